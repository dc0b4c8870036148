#include "dracc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"

namespace dracc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError, std::string(key) + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  auto v = csv::parse_number(trim(text));
  if (!v) throw Error(ErrorCode::ConfigError, std::string(key) + ": '" + std::string(text) + "' is not a number");
  return *v;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of(", ", pos);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(pos, end - pos));
    if (!item.empty()) out.push_back(item);
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::size_t Scenario::index() const noexcept {
  return (outcome == sim::Spec::Correct ? 0 : 2) + (propensity == sim::Spec::Correct ? 0 : 1);
}

std::string Scenario::id() const {
  return "mu-" + std::string(sim::to_string(outcome)) + "_pi-" + std::string(sim::to_string(propensity));
}

std::string Scenario::label() const {
  auto cap = [](sim::Spec s) { return s == sim::Spec::Correct ? std::string("Correct") : std::string("Incorrect"); };
  return cap(outcome) + " mu, " + cap(propensity) + " pi";
}

std::vector<Scenario> all_scenarios() {
  using sim::Spec;
  return {{Spec::Correct, Spec::Correct},
          {Spec::Correct, Spec::Incorrect},
          {Spec::Incorrect, Spec::Correct},
          {Spec::Incorrect, Spec::Incorrect}};
}

Scenario parse_scenario(std::string_view text) {
  text = trim(text);
  for (const auto& s : all_scenarios()) {
    const std::string shorthand{s.outcome == sim::Spec::Correct ? 'c' : 'i',
                                s.propensity == sim::Spec::Correct ? 'c' : 'i'};
    if (text == shorthand || text == s.id()) return s;
  }
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + std::string(text) + "' (use cc, ci, ic, ii)");
}

void StudyConfig::validate() const {
  if (sample_sizes.empty()) throw Error(ErrorCode::ConfigError, "sample_sizes is empty");
  for (auto n : sample_sizes) {
    if (n < 20) throw Error(ErrorCode::ConfigError, "sample sizes must be at least 20");
  }
  if (replications < 1) throw Error(ErrorCode::ConfigError, "replications must be at least 1");
  if (scenarios.empty()) throw Error(ErrorCode::ConfigError, "no scenarios selected");
  if (bootstrap_b < 1000) throw Error(ErrorCode::ConfigError, "inference.bootstrap_b must be at least 1000");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ConfigError, "inference.alpha must lie in (0, 1)");
  if (!(nuisance.tol > 0.0)) throw Error(ErrorCode::ConfigError, "nuisance.tol must be positive");
  if (nuisance.max_iter < 1) throw Error(ErrorCode::ConfigError, "nuisance.max_iter must be positive");
  if (!(nuisance.floor > 0.0 && nuisance.floor < 0.5)) {
    throw Error(ErrorCode::ConfigError, "nuisance.eps must lie in (0, 0.5)");
  }
}

unsigned StudyConfig::effective_workers() const noexcept {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void StudyConfig::apply(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "sample_sizes") {
    sample_sizes.clear();
    for (auto item : split_list(value)) sample_sizes.push_back(parse_integer<std::size_t>(key, item));
  } else if (key == "replications") {
    replications = parse_integer<std::size_t>(key, value);
  } else if (key == "scenarios") {
    scenarios.clear();
    for (auto item : split_list(value)) {
      if (item == "all") {
        scenarios = all_scenarios();
        break;
      }
      scenarios.push_back(parse_scenario(item));
    }
  } else if (key == "master_seed") {
    master_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "workers") {
    workers = parse_integer<unsigned>(key, value);
  } else if (key == "inference.bootstrap_b") {
    bootstrap_b = parse_integer<std::size_t>(key, value);
  } else if (key == "inference.alpha") {
    alpha = parse_real(key, value);
  } else if (key == "nuisance.tol") {
    nuisance.tol = parse_real(key, value);
  } else if (key == "nuisance.max_iter") {
    nuisance.max_iter = parse_integer<int>(key, value);
  } else if (key == "nuisance.eps") {
    nuisance.floor = parse_real(key, value);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
  }
}

StudyConfig parse_study_config(std::string_view text) {
  StudyConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    config.apply(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_study_config(buffer.str());
}

const std::vector<std::pair<std::string, std::string>>& study_config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"sample_sizes", "comma separated sample sizes (default 100,200,1000)"},
      {"replications", "Monte Carlo replications per cell (default 1000)"},
      {"scenarios", "subset of cc,ci,ic,ii or 'all' (outcome spec, propensity spec)"},
      {"master_seed", "64-bit master seed; all substreams derive from it"},
      {"workers", "replication worker threads, 0 = available parallelism"},
      {"inference.bootstrap_b", "parametric bootstrap draws per replication (default 10000)"},
      {"inference.alpha", "1 - confidence level (default 0.05)"},
      {"nuisance.tol", "IRLS convergence tolerance (default 1e-8)"},
      {"nuisance.max_iter", "IRLS iteration cap (default 100)"},
      {"nuisance.eps", "propensity floor for predictions (default 1e-6)"},
  };
  return keys;
}

}  // namespace dracc
