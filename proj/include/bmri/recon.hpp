#pragma once

#include <memory>
#include <string>

#include "bmri/encoding.hpp"
#include "bmri/prior_net.hpp"

namespace bmri {

enum class StepMode { Fixed, Harmonic };
enum class InitMode { ZeroFilled, Random, Provided };

struct ReconConfig {
    int max_iter = 200;
    // stopping threshold on the pre-projection ||Az - y||^2; negative means
    // auto (1e-10 * ||y||^2)
    double stop_tol = -1.0;
    StepMode step_mode = StepMode::Fixed;
    double step_size = 3e-3;  // alpha (fixed) or alpha_0 (harmonic alpha_0/k)
    double dropout_rate = 0.5;
    std::size_t patch = 0;  // 0: full extent
    InitMode init = InitMode::ZeroFilled;
    std::uint64_t seed = 1;
    // flips the prior step to descend log g (the literal update direction of
    // the source algorithm listing); the default ascends
    bool descend_log_prior = false;
    // fresh gradient-dropout mask each iteration (default) or one fixed mask
    bool fresh_dropout_mask = true;
    ProjectionOptions projection{};
};

struct IterRecord {
    int iter = 0;
    double neg_log_prior = 0.0;  // -log g of the tiled iterate
    double resid_pre = 0.0;      // ||Az - y||^2 before projection
    double resid_post = 0.0;     // ||Ax - y||^2 after projection
    double step = 0.0;
    double ms = 0.0;
};

struct ConvergenceLog {
    std::vector<IterRecord> records;
    // header: iter,neg_log_prior,resid_pre,resid_post,step,ms
    void write_csv(const std::string& path, bool include_timing = true) const;
};

struct ReconResult {
    ComplexArray image;
    ConvergenceLog log;
};

// A*y: the naive adjoint (zero-filled) baseline.
ComplexArray zero_filled(const EncodingOperator& op, const ComplexArray& y);

struct CgSenseResult {
    ComplexArray image;
    std::vector<double> residual_history;  // relative normal-equation residuals
    CgStatus status = CgStatus::Converged;
    int iterations = 0;
};

// Least-squares baseline: CG on the normal equations A*A x = A*y.
CgSenseResult cg_sense(const EncodingOperator& op, const ComplexArray& y, double tol,
                       int max_iter);

// Per-tile log-prior evaluation used by the MAP loop; the network-backed
// implementation applies gradient dropout internally.
struct TilePriorEval {
    double loglik = 0.0;
    ComplexArray grad;
};

class TilePrior {
public:
    virtual ~TilePrior() = default;
    virtual TilePriorEval eval(const ComplexArray& tile, Rng& rng) const = 0;
};

class NetTilePrior final : public TilePrior {
public:
    NetTilePrior(const PriorNet& net, Discretization disc, double dropout_rate)
        : net_(&net), disc_(disc), dropout_rate_(dropout_rate) {}
    TilePriorEval eval(const ComplexArray& tile, Rng& rng) const override;

private:
    const PriorNet* net_;
    Discretization disc_;
    double dropout_rate_;
};

// Zero gradient, zero log-likelihood; the loop then reduces to repeated
// data-consistency projection.
class ZeroTilePrior final : public TilePrior {
public:
    TilePriorEval eval(const ComplexArray& tile, Rng& rng) const override;
};

// Projected subgradient MAP loop: per iteration, circularly shift along the
// phase-encode axis by a fresh random offset, split into patch x patch
// tiles, take a prior step per tile, merge, un-shift, then project onto
// {x : Ax = y}. Stops when the pre-projection ||Az - y||^2 drops below the
// threshold or max_iter is reached.
ReconResult map_reconstruct(const TilePrior& prior, const EncodingOperator& op,
                            const ComplexArray& y, const ReconConfig& cfg,
                            const ComplexArray* init_image = nullptr);

// Convenience overload wiring the trained network in.
ReconResult map_reconstruct(const PriorNet& net, const EncodingOperator& op,
                            const ComplexArray& y, const ReconConfig& cfg,
                            const Discretization& disc,
                            const ComplexArray* init_image = nullptr);

}  // namespace bmri
