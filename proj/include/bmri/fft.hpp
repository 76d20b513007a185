#pragma once

#include "bmri/array.hpp"

namespace bmri {

// Unitary 2-D DFT pair: both directions scale by 1/sqrt(H*W), so
// ifft2(fft2(x)) == x and ||fft2(x)|| == ||x||.
// Extents must be powers of two; other sizes are rejected with a ShapeError.
ComplexArray fft2(const ComplexArray& img);
ComplexArray ifft2(const ComplexArray& img);

bool is_power_of_two(std::size_t n);

}  // namespace bmri
