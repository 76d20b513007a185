#pragma once

#include "bmri/array.hpp"

namespace bmri {

// All metrics compare magnitude images. The reference must not be all zero.
// RMSE% = 100 * || |x| - |ref| ||_2 / || |ref| ||_2
double rmse_percent(const ComplexArray& x, const ComplexArray& ref);

// PSNR = 20 log10(peak / rms_error), peak = max |ref|; +infinity when the
// magnitudes agree exactly.
double psnr_db(const ComplexArray& x, const ComplexArray& ref);

// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range = max |ref|, averaged over positions where the
// full window fits; reported x100.
double ssim_percent(const ComplexArray& x, const ComplexArray& ref);

}  // namespace bmri
