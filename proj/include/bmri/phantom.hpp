#pragma once

#include "bmri/array.hpp"

namespace bmri {

// Synthetic complex ellipse phantoms: one large central ellipse plus
// randomized smaller ones, magnitude kept in [0, 1], with a smooth low-order
// polynomial phase of bounded amplitude (radians). Deterministic under seed.
struct PhantomSpec {
    std::size_t h = 32, w = 32;
    std::size_t n_ellipses = 6;
    double min_intensity = 0.2;
    double max_intensity = 1.0;
    double phase_amplitude = 0.5;
    std::uint64_t seed = 1;
};

std::vector<ComplexArray> generate_phantoms(const PhantomSpec& spec, std::size_t n);

// i.i.d. complex Gaussian noise: each of the real/imaginary components gets
// std/sqrt(2) so the complex sample has standard deviation std.
void add_noise(ComplexArray& y, double std, Rng& rng);

}  // namespace bmri
