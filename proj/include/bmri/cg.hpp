#pragma once

#include <functional>

#include "bmri/array.hpp"

namespace bmri {

enum class CgStatus { Converged, MaxIter, Stalled };

struct CgResult {
    ComplexArray x;
    double rel_residual = 0.0;  // achieved ||op(x) - rhs|| / ||rhs||
    int iterations = 0;
    CgStatus status = CgStatus::Converged;
    std::vector<double> residual_history;  // relative, one entry per iteration
};

// Conjugate gradients for a Hermitian positive semi-definite linear map.
// Returns the best iterate seen. Stops on tol * ||rhs||, on max_iter, on
// zero/negative curvature, or when the residual stagnates (no improvement
// over a 30-iteration window or growth beyond 100x the best), which is how
// inconsistent right-hand sides on singular maps surface.
CgResult cg_solve(const std::function<ComplexArray(const ComplexArray&)>& apply_op,
                  const ComplexArray& rhs, double tol, int max_iter);

}  // namespace bmri
