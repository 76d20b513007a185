#pragma once

#include "bmri/array.hpp"
#include "bmri/cg.hpp"
#include "bmri/nudft.hpp"

namespace bmri {

enum class MaskKind { Full, Uniform, Random1D };

// 1-D undersampling along the phase-encode axis (rows). The ACS block is a
// centered, fully sampled run of lines present in every mask.
struct SamplingMask {
    MaskKind kind = MaskKind::Full;
    std::size_t h = 0, w = 0;
    std::vector<std::size_t> lines;  // sorted, unique, in [0, h)

    bool full() const { return lines.size() == h; }
    double fraction() const {
        return static_cast<double>(lines.size()) / static_cast<double>(h);
    }
    void validate() const;
};

// For even extents the centered ACS block of width acs covers rows
// floor(H/2)-ceil(acs/2) .. floor(H/2)+floor(acs/2)-1.
std::vector<std::size_t> acs_lines(std::size_t h, std::size_t acs);

SamplingMask make_full_mask(std::size_t h, std::size_t w);
// lines {0, R, 2R, ...} plus the centered ACS block
SamplingMask make_uniform_mask(std::size_t h, std::size_t w, std::size_t r, std::size_t acs);
// centered ACS block plus floor(rate*H) outer lines drawn without
// replacement from the non-ACS rows
SamplingMask make_random_mask(std::size_t h, std::size_t w, double rate, std::size_t acs,
                              Rng& rng);

// Archimedean spiral arms, evenly rotated, each sampled uniformly in arc
// length from k = 0 out to 0.5*(1 - 1/max(H,W)). interleaves_total sets the
// turn count needed for Nyquist coverage by the full arm set.
Trajectory make_spiral(std::size_t h, std::size_t w, std::size_t interleaves_total,
                       std::size_t interleaves_used, std::size_t samples_per_leaf);

// Smooth synthetic coil profiles: Gaussian magnitude lobes centered at
// evenly spaced boundary points with smooth per-coil phase, normalized so
// sum_c |S_c(p)|^2 == 1 at every pixel.
struct CoilSensitivities {
    std::size_t coils = 0, h = 0, w = 0;
    ComplexArray maps;  // shape {coils, h, w}
};
CoilSensitivities synth_sensitivities(std::size_t h, std::size_t w, std::size_t coils);

struct ProjectionOptions {
    double cg_tol = 1e-12;
    int cg_max_iter = 400;
    bool force_cg = false;  // bypass the closed form (for cross-checking)
};

struct ProjectionResult {
    ComplexArray x;
    double resid_pre = 0.0;   // ||A z - y|| before the correction
    double resid_post = 0.0;  // ||A x - y|| after
    bool used_cg = false;
    CgStatus cg_status = CgStatus::Converged;
    double cg_rel_residual = 0.0;
    int cg_iterations = 0;
};

// The forward model: sampled k-space per coil from masked unitary FFTs (or
// the exact nonuniform DFT) of sensitivity-weighted images. Sample vectors
// are coil-major, shape {coils, M}; Cartesian samples run over the sampled
// lines in ascending order, each line contributing its full row.
class EncodingOperator {
public:
    static EncodingOperator cartesian(CoilSensitivities sens, SamplingMask mask);
    static EncodingOperator noncartesian(CoilSensitivities sens, Trajectory traj);

    bool is_cartesian() const { return cartesian_; }
    std::size_t coils() const { return sens_.coils; }
    std::size_t height() const { return sens_.h; }
    std::size_t width() const { return sens_.w; }
    std::size_t samples_per_coil() const;
    const SamplingMask& mask() const;
    const Trajectory& trajectory() const;
    const CoilSensitivities& sensitivities() const { return sens_; }

    ComplexArray forward(const ComplexArray& x) const;
    ComplexArray adjoint(const ComplexArray& y) const;

    // z - A*(AA*)^{-1}(Az - y). The inverse is applied in closed form where
    // AA* is exactly the identity on the sampled subspace (single coil with
    // normalized maps, or a fully sampled Cartesian grid); otherwise CG is
    // used. A vanishing pre-residual short-circuits to z.
    ProjectionResult project(const ComplexArray& z, const ComplexArray& y,
                             const ProjectionOptions& opts = {}) const;

    bool closed_form_valid() const;

private:
    EncodingOperator() = default;
    CoilSensitivities sens_;
    SamplingMask mask_;
    Trajectory traj_;
    bool cartesian_ = true;
};

// Spec-named convenience wrapper around EncodingOperator::forward/adjoint.
inline ComplexArray apply_forward(const EncodingOperator& op, const ComplexArray& x) {
    return op.forward(x);
}
inline ComplexArray apply_adjoint(const EncodingOperator& op, const ComplexArray& y) {
    return op.adjoint(y);
}
inline ComplexArray project_onto_data(const EncodingOperator& op, const ComplexArray& z,
                                      const ComplexArray& y) {
    return op.project(z, y).x;
}

}  // namespace bmri
