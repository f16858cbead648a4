#pragma once

#include "inexvi/core.hpp"
#include "inexvi/diagnostics.hpp"
#include "inexvi/experiments.hpp"
#include "inexvi/extragradient.hpp"
#include "inexvi/fw_projection.hpp"
#include "inexvi/oracles.hpp"
#include "inexvi/problems.hpp"
#include "inexvi/residual.hpp"
