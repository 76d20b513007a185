#include "bmri/mixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace bmri {

void Discretization::validate() const {
    if (!(d > 0.0)) throw ValidationError("discretization: bin width must be positive");
    if (!(hi > lo)) throw ValidationError("discretization: hi must exceed lo");
    const double steps = (hi - lo) / d;
    if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 1.0)
        throw ValidationError("discretization: (hi - lo)/d must be a positive integer");
}

std::size_t Discretization::bin_count() const {
    return static_cast<std::size_t>(std::llround((hi - lo) / d)) + 1;
}

std::size_t Discretization::bin_index(double v) const {
    const double t = std::round((v - lo) / d);
    const double n = static_cast<double>(bin_count() - 1);
    return static_cast<std::size_t>(std::clamp(t, 0.0, n));
}

MixtureParams::MixtureParams(std::size_t h_, std::size_t w_, std::size_t k_)
    : h(h_), w(w_), k(k_),
      pi_logits(h_ * w_ * k_, 0.0),
      mu(h_ * w_ * k_ * 2, 0.0),
      log_s(h_ * w_ * k_ * 2, 0.0),
      alpha(h_ * w_ * k_, 0.0) {}

void MixtureParams::validate() const {
    if (h == 0 || w == 0 || k == 0)
        throw ValidationError("mixture params: empty dimensions");
    if (k > kMaxMixtures)
        throw ValidationError("mixture params: too many mixture components");
    const std::size_t n = h * w * k;
    if (pi_logits.size() != n || alpha.size() != n || mu.size() != 2 * n || log_s.size() != 2 * n)
        throw ShapeError("mixture params: tensor sizes inconsistent with (H,W,K)");
    auto finite = [](const std::vector<double>& t) {
        for (double v : t)
            if (!std::isfinite(v)) return false;
        return true;
    };
    if (!finite(pi_logits) || !finite(mu) || !finite(log_s) || !finite(alpha))
        throw ValidationError("mixture params: non-finite entry");
}

void MixtureParams::fill_zero() {
    std::fill(pi_logits.begin(), pi_logits.end(), 0.0);
    std::fill(mu.begin(), mu.end(), 0.0);
    std::fill(log_s.begin(), log_s.end(), 0.0);
    std::fill(alpha.begin(), alpha.end(), 0.0);
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double logistic_cdf(double v, double mu, double s) {
    if (!(s > 0.0)) throw ValidationError("logistic_cdf: scale must be positive");
    return sigmoid((v - mu) / s);
}

void softmax(std::span<const double> logits, std::span<double> pi) {
    double m = logits[0];
    for (double l : logits) m = std::max(m, l);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        pi[i] = std::exp(logits[i] - m);
        sum += pi[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) pi[i] /= sum;
}

namespace {

// One component's bin mass and the pieces its partial derivatives are built
// from. Edge bins drop the corresponding CDF term entirely.
struct ComponentEval {
    double bin_prob;     // sigma(zp) - sigma(zm), with edge extension
    double dprob_dmu;    // d bin_prob / d mean
    double dprob_dv;     // d bin_prob / d value
    double dprob_dlogs;  // d bin_prob / d log_s (0 when the clamp is active)
};

ComponentEval eval_component(double v, double mu, double s, bool clamped, bool lo_edge,
                             bool hi_edge, double half_d) {
    double cp = 1.0, dp = 0.0, zp = 0.0;
    if (!hi_edge) {
        zp = (v + half_d - mu) / s;
        cp = sigmoid(zp);
        dp = cp * (1.0 - cp);
    }
    double cm = 0.0, dm = 0.0, zm = 0.0;
    if (!lo_edge) {
        zm = (v - half_d - mu) / s;
        cm = sigmoid(zm);
        dm = cm * (1.0 - cm);
    }
    ComponentEval e;
    e.bin_prob = cp - cm;
    e.dprob_dmu = (dm - dp) / s;
    e.dprob_dv = (dp - dm) / s;
    e.dprob_dlogs = clamped ? 0.0 : (dm * zm - dp * zp);
    return e;
}

struct ChannelScratch {
    std::array<double, kMaxMixtures> pi;
    std::array<ComponentEval, kMaxMixtures> re;
    std::array<ComponentEval, kMaxMixtures> im;
    std::array<double, kMaxMixtures> s_re, s_im;
    std::array<bool, kMaxMixtures> clamp_re, clamp_im;
    std::array<double, kMaxMixtures> alpha;
    double p_re = 0.0, p_im = 0.0;
};

// Evaluates both channels of one pixel. Gradients are accumulated into the
// grad tensors / grad_x when provided. Returns the joint log-probability.
double pixel_eval(double re, double im, const MixtureParams& params, std::size_t i,
                  std::size_t j, const Discretization& disc, MixtureParams* grad_params,
                  cplx* grad_x) {
    const std::size_t K = params.k;
    ChannelScratch sc;
    softmax(std::span<const double>(&params.pi_logits[params.idx_k(i, j, 0)], K),
            std::span<double>(sc.pi.data(), K));

    const double half_d = 0.5 * disc.d;
    const std::size_t nbins = disc.bin_count();
    const std::size_t bi_re = disc.bin_index(re);
    const std::size_t bi_im = disc.bin_index(im);
    const bool re_lo = bi_re == 0, re_hi = bi_re == nbins - 1;
    const bool im_lo = bi_im == 0, im_hi = bi_im == nbins - 1;

    for (std::size_t kk = 0; kk < K; ++kk) {
        const double ls_re = params.log_s[params.idx_kc(i, j, kk, 0)];
        const double ls_im = params.log_s[params.idx_kc(i, j, kk, 1)];
        sc.clamp_re[kk] = ls_re < kLogScaleFloor;
        sc.clamp_im[kk] = ls_im < kLogScaleFloor;
        sc.s_re[kk] = std::exp(std::max(ls_re, kLogScaleFloor));
        sc.s_im[kk] = std::exp(std::max(ls_im, kLogScaleFloor));
        sc.alpha[kk] = params.alpha[params.idx_k(i, j, kk)];

        const double mu_re = params.mu[params.idx_kc(i, j, kk, 0)];
        const double mu_im = params.mu[params.idx_kc(i, j, kk, 1)] + sc.alpha[kk] * re;
        sc.re[kk] = eval_component(re, mu_re, sc.s_re[kk], sc.clamp_re[kk], re_lo, re_hi, half_d);
        sc.im[kk] = eval_component(im, mu_im, sc.s_im[kk], sc.clamp_im[kk], im_lo, im_hi, half_d);
        sc.p_re += sc.pi[kk] * sc.re[kk].bin_prob;
        sc.p_im += sc.pi[kk] * sc.im[kk].bin_prob;
    }

    const bool re_floored = !(sc.p_re > kProbFloor);
    const bool im_floored = !(sc.p_im > kProbFloor);
    const double lp = std::log(re_floored ? kProbFloor : sc.p_re) +
                      std::log(im_floored ? kProbFloor : sc.p_im);

    if (grad_params == nullptr && grad_x == nullptr) return lp;

    double d_re = 0.0, d_im = 0.0;
    for (std::size_t kk = 0; kk < K; ++kk) {
        // responsibilities: pi_k * B_k / P per channel (0 when floored)
        const double w_re = re_floored ? 0.0 : sc.pi[kk] * sc.re[kk].bin_prob / sc.p_re;
        const double w_im = im_floored ? 0.0 : sc.pi[kk] * sc.im[kk].bin_prob / sc.p_im;
        const double g_re = re_floored ? 0.0 : sc.pi[kk] / sc.p_re;
        const double g_im = im_floored ? 0.0 : sc.pi[kk] / sc.p_im;

        if (grad_params != nullptr) {
            grad_params->pi_logits[grad_params->idx_k(i, j, kk)] +=
                (w_re - sc.pi[kk]) + (w_im - sc.pi[kk]);
            grad_params->mu[grad_params->idx_kc(i, j, kk, 0)] += g_re * sc.re[kk].dprob_dmu;
            grad_params->mu[grad_params->idx_kc(i, j, kk, 1)] += g_im * sc.im[kk].dprob_dmu;
            grad_params->log_s[grad_params->idx_kc(i, j, kk, 0)] += g_re * sc.re[kk].dprob_dlogs;
            grad_params->log_s[grad_params->idx_kc(i, j, kk, 1)] += g_im * sc.im[kk].dprob_dlogs;
            grad_params->alpha[grad_params->idx_k(i, j, kk)] +=
                g_im * sc.im[kk].dprob_dmu * re;
        }
        d_re += g_re * sc.re[kk].dprob_dv + g_im * sc.im[kk].dprob_dmu * sc.alpha[kk];
        d_im += g_im * sc.im[kk].dprob_dv;
    }
    if (grad_x != nullptr) *grad_x += cplx(d_re, d_im);
    return lp;
}

}  // namespace

double discretized_channel_prob(double v, std::span<const double> pi,
                                std::span<const double> mu, std::span<const double> s,
                                const Discretization& disc) {
    disc.validate();
    if (pi.empty() || pi.size() != mu.size() || pi.size() != s.size())
        throw ValidationError("discretized_channel_prob: component lists must match, K >= 1");
    if (!(v >= disc.lo && v <= disc.hi))
        throw ValidationError("discretized_channel_prob: value outside [lo, hi]");
    for (double sv : s)
        if (!(sv > 0.0)) throw ValidationError("discretized_channel_prob: scale must be positive");

    const std::size_t nbins = disc.bin_count();
    const std::size_t bi = disc.bin_index(v);
    const bool lo_edge = bi == 0, hi_edge = bi == nbins - 1;
    double p = 0.0;
    for (std::size_t kk = 0; kk < pi.size(); ++kk) {
        const ComponentEval e =
            eval_component(v, mu[kk], s[kk], false, lo_edge, hi_edge, 0.5 * disc.d);
        p += pi[kk] * e.bin_prob;
    }
    return p;
}

double pixel_joint_logprob(double re, double im, const MixtureParams& params, std::size_t i,
                           std::size_t j, const Discretization& disc) {
    disc.validate();
    params.validate();
    if (i >= params.h || j >= params.w)
        throw ValidationError("pixel_joint_logprob: pixel index out of range");
    return pixel_eval(re, im, params, i, j, disc, nullptr, nullptr);
}

double image_loglik(const ComplexArray& x, const MixtureParams& params,
                    const Discretization& disc) {
    return image_loglik_grad(x, params, disc, nullptr, nullptr);
}

double image_loglik_grad(const ComplexArray& x, const MixtureParams& params,
                         const Discretization& disc, MixtureParams* grad_params,
                         ComplexArray* grad_x) {
    disc.validate();
    params.validate();
    if (x.rank() != 2 || x.extent(0) != params.h || x.extent(1) != params.w)
        throw ShapeError("image_loglik: image shape does not match params");
    if (grad_params != nullptr) {
        *grad_params = MixtureParams(params.h, params.w, params.k);
    }
    if (grad_x != nullptr) {
        *grad_x = ComplexArray({params.h, params.w});
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < params.h; ++i) {
        for (std::size_t j = 0; j < params.w; ++j) {
            cplx* gx = grad_x != nullptr ? &grad_x->at(i, j) : nullptr;
            ll += pixel_eval(x.at(i, j).real(), x.at(i, j).imag(), params, i, j, disc,
                             grad_params, gx);
        }
    }
    return ll;
}

MixtureParams loglik_grad_params(const ComplexArray& x, const MixtureParams& params,
                                 const Discretization& disc) {
    MixtureParams grad;
    image_loglik_grad(x, params, disc, &grad, nullptr);
    return grad;
}

std::pair<double, double> sample_pixel(const MixtureParams& params, std::size_t i,
                                       std::size_t j, const Discretization& disc, Rng& rng) {
    disc.validate();
    params.validate();
    const std::size_t K = params.k;
    std::array<double, kMaxMixtures> pi;
    softmax(std::span<const double>(&params.pi_logits[params.idx_k(i, j, 0)], K),
            std::span<double>(pi.data(), K));

    const double u = rng.uniform01();
    std::size_t kk = K - 1;
    double cum = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        cum += pi[c];
        if (u < cum) {
            kk = c;
            break;
        }
    }

    auto draw = [&](double mu, double s) {
        const double uu = rng.uniform01_open();
        return mu + s * std::log(uu / (1.0 - uu));
    };
    const double s_re = std::exp(std::max(params.log_s[params.idx_kc(i, j, kk, 0)], kLogScaleFloor));
    const double s_im = std::exp(std::max(params.log_s[params.idx_kc(i, j, kk, 1)], kLogScaleFloor));
    const double re = disc.snap(draw(params.mu[params.idx_kc(i, j, kk, 0)], s_re));
    const double mu_im =
        params.mu[params.idx_kc(i, j, kk, 1)] + params.alpha[params.idx_k(i, j, kk)] * re;
    const double im = disc.snap(draw(mu_im, s_im));
    return {re, im};
}

}  // namespace bmri
