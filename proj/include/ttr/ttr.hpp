#pragma once

// Umbrella header for the whole arbitration library.

#include "ttr/analysis.hpp"
#include "ttr/config.hpp"
#include "ttr/core.hpp"
#include "ttr/curves.hpp"
#include "ttr/error.hpp"
#include "ttr/io.hpp"
#include "ttr/pipeline.hpp"
#include "ttr/rng.hpp"
#include "ttr/rulesets.hpp"
#include "ttr/schedules.hpp"
#include "ttr/scoring.hpp"
#include "ttr/searchspace.hpp"
#include "ttr/simulate.hpp"
#include "ttr/targets.hpp"
