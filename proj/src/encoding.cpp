#include "bmri/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bmri/fft.hpp"

namespace bmri {

void SamplingMask::validate() const {
    if (h == 0 || w == 0) throw ShapeError("sampling mask: empty shape");
    if (lines.empty()) throw ValidationError("sampling mask: no sampled lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i] >= h) throw ValidationError("sampling mask: line index out of range");
        if (i > 0 && lines[i] <= lines[i - 1])
            throw ValidationError("sampling mask: lines must be sorted and unique");
    }
}

std::vector<std::size_t> acs_lines(std::size_t h, std::size_t acs) {
    if (acs > h) throw ValidationError("acs width exceeds phase-encode extent");
    std::vector<std::size_t> out;
    if (acs == 0) return out;
    const std::size_t mid = h / 2;
    const std::size_t lo = mid - (acs + 1) / 2;
    for (std::size_t i = 0; i < acs; ++i) out.push_back(lo + i);
    return out;
}

SamplingMask make_full_mask(std::size_t h, std::size_t w) {
    SamplingMask m;
    m.kind = MaskKind::Full;
    m.h = h;
    m.w = w;
    m.lines.resize(h);
    for (std::size_t i = 0; i < h; ++i) m.lines[i] = i;
    m.validate();
    return m;
}

SamplingMask make_uniform_mask(std::size_t h, std::size_t w, std::size_t r, std::size_t acs) {
    if (r < 1) throw ValidationError("uniform mask: undersampling factor must be >= 1");
    std::set<std::size_t> s;
    for (std::size_t i = 0; i < h; i += r) s.insert(i);
    for (std::size_t i : acs_lines(h, acs)) s.insert(i);
    SamplingMask m;
    m.kind = s.size() == h ? MaskKind::Full : MaskKind::Uniform;
    m.h = h;
    m.w = w;
    m.lines.assign(s.begin(), s.end());
    m.validate();
    return m;
}

SamplingMask make_random_mask(std::size_t h, std::size_t w, double rate, std::size_t acs,
                              Rng& rng) {
    if (!(rate > 0.0 && rate <= 1.0))
        throw ValidationError("random mask: rate must lie in (0, 1]");
    const std::vector<std::size_t> acs_set = acs_lines(h, acs);
    std::set<std::size_t> s(acs_set.begin(), acs_set.end());

    // outer pool excludes the ACS block; picks are without replacement
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < h; ++i)
        if (!std::binary_search(acs_set.begin(), acs_set.end(), i)) pool.push_back(i);
    const std::size_t want = static_cast<std::size_t>(std::floor(rate * static_cast<double>(h)));
    if (want > pool.size())
        throw ValidationError("random mask: requested outer lines exceed available lines");
    for (std::size_t n = 0; n < want; ++n) {
        const std::size_t pick = static_cast<std::size_t>(rng.below(pool.size()));
        s.insert(pool[pick]);
        pool.erase(pool.begin() + static_cast<long>(pick));
    }
    if (s.empty()) throw ValidationError("random mask: empty mask (need acs > 0 or rate > 0)");

    SamplingMask m;
    m.kind = s.size() == h ? MaskKind::Full : MaskKind::Random1D;
    m.h = h;
    m.w = w;
    m.lines.assign(s.begin(), s.end());
    m.validate();
    return m;
}

Trajectory make_spiral(std::size_t h, std::size_t w, std::size_t interleaves_total,
                       std::size_t interleaves_used, std::size_t samples_per_leaf) {
    if (interleaves_total < 1 || interleaves_used < 1 || interleaves_used > interleaves_total)
        throw ValidationError("spiral: need 1 <= interleaves_used <= interleaves_total");
    if (samples_per_leaf < 2) throw ValidationError("spiral: need at least two samples per leaf");
    const double n = static_cast<double>(std::max(h, w));
    const double r_max = 0.5 * (1.0 - 1.0 / n);
    // turns per arm so the full set of interleaves reaches Nyquist spacing
    const double turns = std::max(1.0, 0.5 * n / static_cast<double>(interleaves_total));
    const double theta_max = 2.0 * M_PI * turns;

    // dense theta grid -> cumulative chord length -> uniform arc-length picks
    const std::size_t dense = 32 * samples_per_leaf;
    std::vector<double> arc(dense + 1, 0.0);
    auto radius = [&](double th) { return r_max * th / theta_max; };
    double px = 0.0, py = 0.0;
    for (std::size_t i = 1; i <= dense; ++i) {
        const double th = theta_max * static_cast<double>(i) / static_cast<double>(dense);
        const double x = radius(th) * std::cos(th);
        const double y = radius(th) * std::sin(th);
        arc[i] = arc[i - 1] + std::hypot(x - px, y - py);
        px = x;
        py = y;
    }

    Trajectory t;
    t.kx.reserve(interleaves_used * samples_per_leaf);
    t.ky.reserve(interleaves_used * samples_per_leaf);
    for (std::size_t arm = 0; arm < interleaves_used; ++arm) {
        const double rot = 2.0 * M_PI * static_cast<double>(arm) / static_cast<double>(interleaves_used);
        for (std::size_t s = 0; s < samples_per_leaf; ++s) {
            const double target =
                arc[dense] * static_cast<double>(s) / static_cast<double>(samples_per_leaf - 1);
            const auto it = std::lower_bound(arc.begin(), arc.end(), target);
            std::size_t hi_i = static_cast<std::size_t>(it - arc.begin());
            if (hi_i == 0) hi_i = 1;
            if (hi_i > dense) hi_i = dense;
            const double seg = arc[hi_i] - arc[hi_i - 1];
            const double frac = seg > 0.0 ? (target - arc[hi_i - 1]) / seg : 0.0;
            const double th = theta_max * (static_cast<double>(hi_i - 1) + frac) /
                              static_cast<double>(dense);
            const double r = radius(th);
            t.kx.push_back(r * std::cos(th + rot));
            t.ky.push_back(r * std::sin(th + rot));
        }
    }
    t.validate();
    return t;
}

CoilSensitivities synth_sensitivities(std::size_t h, std::size_t w, std::size_t coils) {
    if (coils < 1) throw ValidationError("sensitivities: need at least one coil");
    if (h == 0 || w == 0) throw ShapeError("sensitivities: empty shape");
    CoilSensitivities s;
    s.coils = coils;
    s.h = h;
    s.w = w;
    s.maps = ComplexArray({coils, h, w});

    const double hh = static_cast<double>(h), ww = static_cast<double>(w);
    const double sigma2 = 2.0 * std::pow(0.6 * std::max(hh, ww), 2);
    for (std::size_t c = 0; c < coils; ++c) {
        const double ang = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(coils);
        const double cx = 0.5 * hh + 0.5 * hh * std::cos(ang);
        const double cy = 0.5 * ww + 0.5 * ww * std::sin(ang);
        for (std::size_t i = 0; i < h; ++i) {
            for (std::size_t j = 0; j < w; ++j) {
                const double di = static_cast<double>(i) - cx;
                const double dj = static_cast<double>(j) - cy;
                const double mag = std::exp(-(di * di + dj * dj) / sigma2);
                // smooth, coil-distinct low-order phase
                const double ph = 0.3 * std::cos(ang) * (static_cast<double>(i) / hh) +
                                  0.3 * std::sin(ang) * (static_cast<double>(j) / ww) +
                                  0.1 * static_cast<double>(c);
                s.maps.at(c, i, j) = mag * cplx(std::cos(ph), std::sin(ph));
            }
        }
    }
    // pixelwise normalization: sum_c |S_c|^2 = 1
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            double e = 0.0;
            for (std::size_t c = 0; c < coils; ++c) e += std::norm(s.maps.at(c, i, j));
            const double inv = 1.0 / std::sqrt(e);
            for (std::size_t c = 0; c < coils; ++c) s.maps.at(c, i, j) *= inv;
        }
    }
    return s;
}

EncodingOperator EncodingOperator::cartesian(CoilSensitivities sens, SamplingMask mask) {
    mask.validate();
    if (sens.h != mask.h || sens.w != mask.w)
        throw ShapeError("encoding operator: sensitivity and mask shapes differ");
    EncodingOperator op;
    op.sens_ = std::move(sens);
    op.mask_ = std::move(mask);
    op.cartesian_ = true;
    return op;
}

EncodingOperator EncodingOperator::noncartesian(CoilSensitivities sens, Trajectory traj) {
    traj.validate();
    EncodingOperator op;
    op.sens_ = std::move(sens);
    op.traj_ = std::move(traj);
    op.cartesian_ = false;
    return op;
}

std::size_t EncodingOperator::samples_per_coil() const {
    return cartesian_ ? mask_.lines.size() * sens_.w : traj_.size();
}

const SamplingMask& EncodingOperator::mask() const {
    if (!cartesian_) throw ValidationError("encoding operator: no mask in noncartesian mode");
    return mask_;
}

const Trajectory& EncodingOperator::trajectory() const {
    if (cartesian_) throw ValidationError("encoding operator: no trajectory in cartesian mode");
    return traj_;
}

ComplexArray EncodingOperator::forward(const ComplexArray& x) const {
    if (x.rank() != 2 || x.extent(0) != sens_.h || x.extent(1) != sens_.w)
        throw ShapeError("encoding forward: image shape mismatch");
    const std::size_t m = samples_per_coil();
    ComplexArray y({sens_.coils, m});
    ComplexArray weighted({sens_.h, sens_.w});
    for (std::size_t c = 0; c < sens_.coils; ++c) {
        for (std::size_t i = 0; i < sens_.h; ++i)
            for (std::size_t j = 0; j < sens_.w; ++j)
                weighted.at(i, j) = sens_.maps.at(c, i, j) * x.at(i, j);
        if (cartesian_) {
            const ComplexArray k = fft2(weighted);
            std::size_t n = 0;
            for (std::size_t l : mask_.lines)
                for (std::size_t j = 0; j < sens_.w; ++j) y.at(c, n++) = k.at(l, j);
        } else {
            const ComplexArray k = nudft_forward(weighted, traj_);
            for (std::size_t n = 0; n < m; ++n) y.at(c, n) = k[n];
        }
    }
    return y;
}

ComplexArray EncodingOperator::adjoint(const ComplexArray& y) const {
    const std::size_t m = samples_per_coil();
    if (y.rank() != 2 || y.extent(0) != sens_.coils || y.extent(1) != m)
        throw ShapeError("encoding adjoint: sample shape mismatch");
    ComplexArray out({sens_.h, sens_.w});
    for (std::size_t c = 0; c < sens_.coils; ++c) {
        ComplexArray img({sens_.h, sens_.w});
        if (cartesian_) {
            ComplexArray k({sens_.h, sens_.w});
            std::size_t n = 0;
            for (std::size_t l : mask_.lines)
                for (std::size_t j = 0; j < sens_.w; ++j) k.at(l, j) = y.at(c, n++);
            img = ifft2(k);
        } else {
            ComplexArray samples({m});
            for (std::size_t n = 0; n < m; ++n) samples[n] = y.at(c, n);
            img = nudft_adjoint(samples, traj_, sens_.h, sens_.w);
        }
        for (std::size_t i = 0; i < sens_.h; ++i)
            for (std::size_t j = 0; j < sens_.w; ++j)
                out.at(i, j) += std::conj(sens_.maps.at(c, i, j)) * img.at(i, j);
    }
    return out;
}

bool EncodingOperator::closed_form_valid() const {
    if (!cartesian_) return false;
    return sens_.coils == 1 || mask_.full();
}

ProjectionResult EncodingOperator::project(const ComplexArray& z, const ComplexArray& y,
                                           const ProjectionOptions& opts) const {
    ProjectionResult res;
    ComplexArray r = forward(z);
    r -= y;
    res.resid_pre = r.norm2();

    // already on the constraint set (to roundoff): avoid exciting the
    // null space of AA* with a noise-only right-hand side
    const double scale = y.norm2() + res.resid_pre;
    if (res.resid_pre <= 1e-14 * scale) {
        res.x = z;
        res.resid_post = res.resid_pre;
        return res;
    }

    ComplexArray correction({sens_.h, sens_.w});
    if (closed_form_valid() && !opts.force_cg) {
        correction = adjoint(r);
    } else {
        res.used_cg = true;
        auto normal = [this](const ComplexArray& u) { return forward(adjoint(u)); };
        CgResult cg = cg_solve(normal, r, opts.cg_tol, opts.cg_max_iter);
        res.cg_status = cg.status;
        res.cg_rel_residual = cg.rel_residual;
        res.cg_iterations = cg.iterations;
        correction = adjoint(cg.x);
    }
    res.x = z;
    res.x -= correction;
    ComplexArray r2 = forward(res.x);
    r2 -= y;
    res.resid_post = r2.norm2();
    return res;
}

}  // namespace bmri
