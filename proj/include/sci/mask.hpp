#pragma once

#include <cstdint>

#include "sci/cube.hpp"

namespace sci {

// Generate a mask stack.
//   bernoulli:    param = p, inclusion probability in (0,1); values in {0,1}.
//   gaussian:     param ignored; values ~ N(0,1).
//   shifted-base: param = integer shift step s >= 1; frame k is frame 0
//                 cyclically shifted down by k*s rows.
// Deterministic given (kind, dims, param, seed).
MaskStack make_masks(MaskKind kind, int nx, int ny, int nt, double param, uint64_t seed);

}  // namespace sci
