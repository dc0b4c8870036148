#pragma once

#include "dracc/ate_analysis.hpp"
#include "dracc/config.hpp"
#include "dracc/csv.hpp"
#include "dracc/data.hpp"
#include "dracc/error.hpp"
#include "dracc/estimators.hpp"
#include "dracc/inference.hpp"
#include "dracc/metrics.hpp"
#include "dracc/nuisance.hpp"
#include "dracc/plots.hpp"
#include "dracc/report.hpp"
#include "dracc/rng.hpp"
#include "dracc/simgen.hpp"
#include "dracc/study.hpp"
