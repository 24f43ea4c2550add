#pragma once

#include "sci/cube.hpp"

namespace sci {

// 10*log10(peak^2 / MSE), capped at 100 dB when MSE = 0.
double psnr(const DataCube& reference, const DataCube& estimate, double peak = 1.0);

// Mean SSIM over frames; 11x11 Gaussian window (sigma 1.5), K1=0.01,
// K2=0.03, dynamic range 1.0. Frames must be at least 11x11.
double ssim(const DataCube& reference, const DataCube& estimate);

}  // namespace sci
