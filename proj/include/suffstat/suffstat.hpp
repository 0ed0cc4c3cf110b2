#pragma once

#include "suffstat/config.hpp"
#include "suffstat/curves.hpp"
#include "suffstat/effects.hpp"
#include "suffstat/error.hpp"
#include "suffstat/experiments.hpp"
#include "suffstat/ingest.hpp"
#include "suffstat/learners.hpp"
#include "suffstat/matrix.hpp"
#include "suffstat/parallel.hpp"
#include "suffstat/random.hpp"
#include "suffstat/regression.hpp"
#include "suffstat/report.hpp"
#include "suffstat/synth.hpp"

namespace suffstat {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace suffstat
