#pragma once

namespace dirstep {
inline constexpr const char* kVersion = "1.0.0";
}

#include "dirstep/distributions.hpp"
#include "dirstep/error_metrics.hpp"
#include "dirstep/hypotheses.hpp"
#include "dirstep/oracles.hpp"
#include "dirstep/procedures.hpp"
#include "dirstep/pvalues.hpp"
#include "dirstep/simulation.hpp"
#include "dirstep/stepwise.hpp"
