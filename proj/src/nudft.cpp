#include "bmri/nudft.hpp"

#include <cmath>

namespace bmri {

void Trajectory::validate() const {
    if (kx.size() != ky.size())
        throw ShapeError("trajectory: kx and ky must have equal length");
    if (kx.empty()) throw ValidationError("trajectory: must contain at least one sample");
    for (std::size_t m = 0; m < kx.size(); ++m) {
        if (!(kx[m] >= -0.5 && kx[m] < 0.5) || !(ky[m] >= -0.5 && ky[m] < 0.5))
            throw ValidationError("trajectory: coordinate outside [-0.5, 0.5)");
    }
}

Trajectory full_grid_trajectory(std::size_t h, std::size_t w) {
    Trajectory t;
    t.kx.reserve(h * w);
    t.ky.reserve(h * w);
    for (std::size_t u = 0; u < h; ++u) {
        double fu = static_cast<double>(u) / static_cast<double>(h);
        if (fu >= 0.5) fu -= 1.0;
        for (std::size_t v = 0; v < w; ++v) {
            double fv = static_cast<double>(v) / static_cast<double>(w);
            if (fv >= 0.5) fv -= 1.0;
            t.kx.push_back(fu);
            t.ky.push_back(fv);
        }
    }
    return t;
}

namespace {

// Per-sample separable phase vectors keep the inner sum O(H*W) with only
// O(H+W) trig evaluations.
void fill_phases(double k, std::size_t n, int sign, std::vector<cplx>& out) {
    out.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double ang = sign * 2.0 * M_PI * k * static_cast<double>(p);
        out[p] = cplx(std::cos(ang), std::sin(ang));
    }
}

}  // namespace

ComplexArray nudft_forward(const ComplexArray& img, const Trajectory& traj) {
    if (img.rank() != 2) throw ShapeError("nudft_forward: expected a 2-D array");
    traj.validate();
    const std::size_t h = img.extent(0), w = img.extent(1), m = traj.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));

    ComplexArray out({m});
    std::vector<cplx> rowp, colp;
    for (std::size_t s = 0; s < m; ++s) {
        fill_phases(traj.kx[s], h, -1, rowp);
        fill_phases(traj.ky[s], w, -1, colp);
        cplx acc = 0.0;
        for (std::size_t p = 0; p < h; ++p) {
            const cplx* row = img.data() + p * w;
            cplx rsum = 0.0;
            for (std::size_t q = 0; q < w; ++q) rsum += row[q] * colp[q];
            acc += rowp[p] * rsum;
        }
        out[s] = scale * acc;
    }
    return out;
}

ComplexArray nudft_adjoint(const ComplexArray& samples, const Trajectory& traj,
                           std::size_t h, std::size_t w) {
    if (samples.rank() != 1) throw ShapeError("nudft_adjoint: expected a 1-D sample vector");
    traj.validate();
    if (samples.size() != traj.size())
        throw ShapeError("nudft_adjoint: sample count does not match trajectory length");
    const double scale = 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));

    ComplexArray out({h, w});
    std::vector<cplx> rowp, colp;
    for (std::size_t s = 0; s < traj.size(); ++s) {
        fill_phases(traj.kx[s], h, +1, rowp);
        fill_phases(traj.ky[s], w, +1, colp);
        const cplx v = scale * samples[s];
        for (std::size_t p = 0; p < h; ++p) {
            cplx* row = out.data() + p * w;
            const cplx rv = v * rowp[p];
            for (std::size_t q = 0; q < w; ++q) row[q] += rv * colp[q];
        }
    }
    return out;
}

}  // namespace bmri
