#include "bmri/recon.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bmri/tiles.hpp"

namespace bmri {

void ConvergenceLog::write_csv(const std::string& path, bool include_timing) const {
    std::ofstream os(path);
    if (!os) throw IoError("convergence log: cannot open " + path);
    os << "iter,neg_log_prior,resid_pre,resid_post,step,ms\n";
    char buf[256];
    for (const IterRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                      r.neg_log_prior, r.resid_pre, r.resid_post, r.step,
                      include_timing ? r.ms : 0.0);
        os << buf;
    }
    if (!os) throw IoError("convergence log: write failed for " + path);
}

ComplexArray zero_filled(const EncodingOperator& op, const ComplexArray& y) {
    return op.adjoint(y);
}

CgSenseResult cg_sense(const EncodingOperator& op, const ComplexArray& y, double tol,
                       int max_iter) {
    const ComplexArray rhs = op.adjoint(y);
    auto normal = [&op](const ComplexArray& x) { return op.adjoint(op.forward(x)); };
    CgResult cg = cg_solve(normal, rhs, tol, max_iter);
    CgSenseResult res;
    res.image = std::move(cg.x);
    res.residual_history = std::move(cg.residual_history);
    res.status = cg.status;
    res.iterations = cg.iterations;
    return res;
}

TilePriorEval NetTilePrior::eval(const ComplexArray& tile, Rng& rng) const {
    NetGradients g = backward(*net_, tile, disc_);
    TilePriorEval out;
    out.loglik = g.loglik;
    out.grad = std::move(g.input);
    if (dropout_rate_ > 0.0) {
        const double keep = 1.0 - dropout_rate_;
        for (std::size_t n = 0; n < out.grad.size(); ++n)
            out.grad[n] = rng.uniform01() >= dropout_rate_ ? out.grad[n] / keep : cplx(0.0, 0.0);
    }
    return out;
}

TilePriorEval ZeroTilePrior::eval(const ComplexArray& tile, Rng& rng) const {
    (void)rng;
    TilePriorEval out;
    out.loglik = 0.0;
    out.grad = ComplexArray(tile.shape());
    return out;
}

ReconResult map_reconstruct(const TilePrior& prior, const EncodingOperator& op,
                            const ComplexArray& y, const ReconConfig& cfg,
                            const ComplexArray* init_image) {
    if (cfg.max_iter < 1) throw ValidationError("map_reconstruct: max_iter must be >= 1");
    if (!(cfg.step_size > 0.0)) throw ValidationError("map_reconstruct: step size must be positive");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw ValidationError("map_reconstruct: dropout rate must lie in [0, 1)");
    const std::size_t h = op.height(), w = op.width();
    const std::size_t patch = cfg.patch == 0 ? h : cfg.patch;
    if (patch == 0 || h % patch != 0 || w % patch != 0)
        throw ValidationError("map_reconstruct: patch must divide the image extents");

    Rng root(cfg.seed);
    Rng shift_rng = root.fork(1);
    Rng dropout_rng = root.fork(2);
    const std::uint64_t fixed_mask_seed = root.fork(3).next_u64();

    ComplexArray x;
    switch (cfg.init) {
        case InitMode::ZeroFilled:
            x = zero_filled(op, y);
            break;
        case InitMode::Random: {
            Rng init_rng = root.fork(4);
            x = ComplexArray({h, w});
            for (std::size_t n = 0; n < x.size(); ++n)
                x[n] = cplx(init_rng.uniform(-0.5, 0.5), init_rng.uniform(-0.5, 0.5));
            break;
        }
        case InitMode::Provided:
            if (init_image == nullptr)
                throw ValidationError("map_reconstruct: init image required but not provided");
            if (init_image->rank() != 2 || init_image->extent(0) != h || init_image->extent(1) != w)
                throw ShapeError("map_reconstruct: init image shape mismatch");
            x = *init_image;
            break;
    }

    const double eps = cfg.stop_tol >= 0.0 ? cfg.stop_tol : 1e-10 * std::pow(y.norm2(), 2);
    const double sign = cfg.descend_log_prior ? -1.0 : 1.0;

    ReconResult result;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const double alpha = cfg.step_mode == StepMode::Fixed
                                 ? cfg.step_size
                                 : cfg.step_size / static_cast<double>(k);

        const long offset = static_cast<long>(shift_rng.below(patch));
        ComplexArray shifted = circ_shift(x, offset, 0);
        std::vector<ComplexArray> tiles = patch_split(shifted, patch);

        Rng fixed_rng(fixed_mask_seed);
        Rng& tile_rng = cfg.fresh_dropout_mask ? dropout_rng : fixed_rng;
        double neg_log_prior = 0.0;
        for (ComplexArray& tile : tiles) {
            const TilePriorEval ev = prior.eval(tile, tile_rng);
            neg_log_prior -= ev.loglik;
            axpy(sign * alpha, ev.grad, tile);
        }

        ComplexArray z = circ_shift(patch_merge(tiles, h, w), -offset, 0);
        if (!z.all_finite()) {
            std::ostringstream os;
            os << "map_reconstruct: non-finite iterate at iteration " << k
               << " (pre-projection image)";
            throw NumericalError(os.str());
        }

        const ProjectionResult proj = op.project(z, y, cfg.projection);
        x = proj.x;
        if (!x.all_finite()) {
            std::ostringstream os;
            os << "map_reconstruct: non-finite iterate at iteration " << k
               << " (post-projection image)";
            throw NumericalError(os.str());
        }

        IterRecord rec;
        rec.iter = k;
        rec.neg_log_prior = neg_log_prior;
        rec.resid_pre = proj.resid_pre * proj.resid_pre;
        rec.resid_post = proj.resid_post * proj.resid_post;
        rec.step = alpha;
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
        result.log.records.push_back(rec);

        if (rec.resid_pre < eps) break;
    }
    result.image = std::move(x);
    return result;
}

ReconResult map_reconstruct(const PriorNet& net, const EncodingOperator& op,
                            const ComplexArray& y, const ReconConfig& cfg,
                            const Discretization& disc, const ComplexArray* init_image) {
    NetTilePrior prior(net, disc, cfg.dropout_rate);
    return map_reconstruct(prior, op, y, cfg, init_image);
}

}  // namespace bmri
