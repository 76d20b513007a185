#pragma once

#include "bmri/array.hpp"

namespace bmri {

// Circular permutation along one axis of a 2-D array; any integer offset is
// taken modulo the extent. circ_shift(circ_shift(x, d, a), -d, a) == x
// bit-exactly.
ComplexArray circ_shift(const ComplexArray& img, long offset, std::size_t axis);

// Non-overlapping patch x patch tiling of a 2-D array, tiles in row-major
// tile order. patch must divide both extents.
std::vector<ComplexArray> patch_split(const ComplexArray& img, std::size_t patch);

// Inverse of patch_split for the given full shape.
ComplexArray patch_merge(const std::vector<ComplexArray>& tiles, std::size_t h, std::size_t w);

}  // namespace bmri
