#include "bmri/cg.hpp"

#include <cmath>

namespace bmri {

CgResult cg_solve(const std::function<ComplexArray(const ComplexArray&)>& apply_op,
                  const ComplexArray& rhs, double tol, int max_iter) {
    if (max_iter < 1) throw ValidationError("cg_solve: max_iter must be >= 1");
    require_finite(rhs, "cg_solve rhs");

    CgResult result;
    result.x = ComplexArray(rhs.shape());
    const double bnorm = rhs.norm2();
    if (bnorm == 0.0) {
        result.rel_residual = 0.0;
        result.status = CgStatus::Converged;
        return result;
    }

    ComplexArray x(rhs.shape());
    ComplexArray r = rhs;
    ComplexArray p = r;
    double rho = std::real(inner(r, r));

    ComplexArray best_x = x;
    double best_res = bnorm;
    int last_improve = 0;
    result.status = CgStatus::MaxIter;

    for (int it = 1; it <= max_iter; ++it) {
        ComplexArray q = apply_op(p);
        require_same_shape(q, p, "cg_solve operator output");
        const double curv = std::real(inner(p, q));
        if (!std::isfinite(curv)) throw NumericalError("cg_solve: non-finite curvature");
        if (curv <= 0.0) {
            result.status = CgStatus::Stalled;
            result.iterations = it;
            break;
        }
        const double alpha = rho / curv;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        const double rho_new = std::real(inner(r, r));
        if (!std::isfinite(rho_new)) throw NumericalError("cg_solve: non-finite residual");
        const double res = std::sqrt(rho_new);
        result.residual_history.push_back(res / bnorm);
        result.iterations = it;
        if (res < best_res) {
            best_res = res;
            best_x = x;
            last_improve = it;
        }
        if (res <= tol * bnorm) {
            result.status = CgStatus::Converged;
            break;
        }
        if (it - last_improve > 30 || res > 100.0 * best_res) {
            result.status = CgStatus::Stalled;
            break;
        }
        const double beta = rho_new / rho;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rho = rho_new;
    }

    result.x = std::move(best_x);
    result.rel_residual = best_res / bnorm;
    return result;
}

}  // namespace bmri
