#pragma once

#include <string>

#include "bmri/array.hpp"

namespace bmri {

// Array container: a pair of files per array. `<base>.hdr` is text — first
// line "# Dimensions", second line space-separated extents, first extent
// varying fastest in the payload (column-major). `<base>.cfl` is raw
// interleaved little-endian float32 (real, imaginary) pairs. In-memory
// arrays are row-major, so extents are written reversed (padded with
// trailing 1s up to three entries) and the payload streams in natural
// memory order. Round-trips are exact at 32-bit precision.
void write_cfl(const std::string& base, const ComplexArray& a);
ComplexArray read_cfl(const std::string& base);

// 8-bit binary PGM exports for visual inspection: magnitude min-max scaled
// to [0,255], phase mapped [-pi,pi] -> [0,255].
void write_pgm_magnitude(const std::string& path, const ComplexArray& img);
void write_pgm_phase(const std::string& path, const ComplexArray& img);

}  // namespace bmri
