#pragma once

#include <span>
#include <utility>

#include "bmri/array.hpp"

namespace bmri {

// Value grid for the discretized likelihood. Bin centers sit at
// lo, lo+d, ..., hi; the lowest bin integrates from -inf and the highest to
// +inf, so the probabilities over all centers sum to exactly 1.
struct Discretization {
    double d = 2.0 / 255.0;
    double lo = -1.0;
    double hi = 1.0;

    void validate() const;
    // number of bin centers, (hi-lo)/d + 1
    std::size_t bin_count() const;
    double bin_center(std::size_t i) const { return lo + static_cast<double>(i) * d; }
    // nearest center index for any v, clamped into range
    std::size_t bin_index(double v) const;
    // clamp to [lo,hi] and round to the nearest center
    double snap(double v) const { return bin_center(bin_index(v)); }
};

// Per-pixel mixture parameters produced by the prior network.
// pi_logits (H,W,K) are shared between the two channels; mu and log_s carry
// a trailing channel axis (0 = real, 1 = imaginary); alpha (H,W,K) couples
// the imaginary-channel mean to the realized real value per component.
// Scales are exp(log_s) with log_s clamped at -7 from below.
struct MixtureParams {
    std::size_t h = 0, w = 0, k = 0;
    std::vector<double> pi_logits;  // (H,W,K)
    std::vector<double> mu;         // (H,W,K,2)
    std::vector<double> log_s;      // (H,W,K,2)
    std::vector<double> alpha;      // (H,W,K)

    MixtureParams() = default;
    MixtureParams(std::size_t h_, std::size_t w_, std::size_t k_);

    std::size_t pix(std::size_t i, std::size_t j) const { return i * w + j; }
    std::size_t idx_k(std::size_t i, std::size_t j, std::size_t kk) const {
        return (i * w + j) * k + kk;
    }
    std::size_t idx_kc(std::size_t i, std::size_t j, std::size_t kk, std::size_t c) const {
        return ((i * w + j) * k + kk) * 2 + c;
    }

    void validate() const;
    void fill_zero();
};

inline constexpr double kLogScaleFloor = -7.0;
inline constexpr double kProbFloor = 1e-12;
inline constexpr std::size_t kMaxMixtures = 32;

// Numerically stable logistic sigmoid CDF of logistic(mu, s); s must be > 0.
double logistic_cdf(double v, double mu, double s);

// Probability mass of the bin around v under a K-component discretized
// logistic mixture for one channel. pi must already be normalized. v must
// lie in [lo, hi]; edge bins extend to +-infinity.
double discretized_channel_prob(double v, std::span<const double> pi,
                                std::span<const double> mu, std::span<const double> s,
                                const Discretization& disc);

// log of the Re/Im joint probability at pixel (i,j): the product of two
// shared-indicator mixtures, the imaginary one evaluated with per-component
// mean mu_im + alpha * re. Per-channel masses are floored at kProbFloor
// before the log.
double pixel_joint_logprob(double re, double im, const MixtureParams& params,
                           std::size_t i, std::size_t j, const Discretization& disc);

// Sum of pixel_joint_logprob over all pixels in raster order.
double image_loglik(const ComplexArray& x, const MixtureParams& params,
                    const Discretization& disc);

// Exact analytic gradient of image_loglik. grad_params (same tensor shapes
// as MixtureParams, holding partials w.r.t. pi_logits, mu, log_s, alpha) and
// grad_x (partials w.r.t. the real/imaginary parts, packed as a complex
// image: grad_re + i*grad_im) may each be null. The likelihood is treated as
// a smooth function of the pixel values. Returns the log-likelihood.
double image_loglik_grad(const ComplexArray& x, const MixtureParams& params,
                         const Discretization& disc, MixtureParams* grad_params,
                         ComplexArray* grad_x);

// Spec-named convenience wrapper: gradient w.r.t. parameters only.
MixtureParams loglik_grad_params(const ComplexArray& x, const MixtureParams& params,
                                 const Discretization& disc);

// Draw one (re, im) pair at pixel (i,j): pick a component from
// softmax(pi_logits), sample the real channel, then the imaginary channel
// with its alpha-shifted mean; both values are clamped and snapped to bin
// centers (the realized, snapped re feeds the imaginary mean).
std::pair<double, double> sample_pixel(const MixtureParams& params, std::size_t i,
                                       std::size_t j, const Discretization& disc, Rng& rng);

// softmax over at most kMaxMixtures logits, written into pi
void softmax(std::span<const double> logits, std::span<double> pi);

}  // namespace bmri
