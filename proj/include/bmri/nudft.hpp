#pragma once

#include "bmri/array.hpp"

namespace bmri {

// Sampling locations in k-space, in cycles/pixel. Every component must lie
// in [-0.5, 0.5). kx pairs with the row index, ky with the column index.
struct Trajectory {
    std::vector<double> kx;
    std::vector<double> ky;

    std::size_t size() const { return kx.size(); }
    void validate() const;
};

// The full Cartesian grid frequencies in the row-major order of fft2 output,
// wrapped into [-0.5, 0.5).
Trajectory full_grid_trajectory(std::size_t h, std::size_t w);

// Exact direct nonuniform DFT, unitary-matched to fft2:
//   s_m = (1/sqrt(HW)) * sum_{p,q} x[p,q] * exp(-2*pi*i*(kx_m*p + ky_m*q))
ComplexArray nudft_forward(const ComplexArray& img, const Trajectory& traj);

// Exact conjugate transpose of nudft_forward; output shape {h, w}.
ComplexArray nudft_adjoint(const ComplexArray& samples, const Trajectory& traj,
                           std::size_t h, std::size_t w);

}  // namespace bmri
