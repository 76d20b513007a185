#pragma once

#include <string>

#include "bmri/array.hpp"
#include "bmri/mixture.hpp"

namespace bmri {

// Topology of the autoregressive prior: a strictly-causal masked convolution
// over the two input channels, a stack of gated residual blocks whose masked
// convolutions may include the center tap, and a 1x1 head projecting to the
// 6K mixture-parameter channels (pi, mu x2, log_s x2, alpha).
struct PriorNetConfig {
    std::size_t blocks = 4;
    std::size_t width = 32;
    std::size_t kernel = 3;    // odd
    std::size_t mixtures = 5;  // K, at most 10
    Discretization disc{};
    std::uint64_t init_seed = 1;
};

struct TrainConfig {
    int epochs = 20;
    std::size_t batch_size = 8;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double dropout_rate = 0.5;  // on hidden activations, training only
    std::uint64_t seed = 1;
};

struct TrainResult {
    // bits/dim of each step's batch, evaluated without dropout after the
    // update, and the per-epoch means of those values
    std::vector<double> step_bits;
    std::vector<double> epoch_bits;
};

struct NetGradients {
    std::vector<double> weights;  // d loglik / d weight, flat layout
    ComplexArray input;           // d loglik / d pixel, re + i*im
    double loglik = 0.0;
};

class PriorNet {
public:
    static PriorNet init(const PriorNetConfig& cfg);

    const PriorNetConfig& config() const { return cfg_; }

    // Weights are stored compactly: masked kernel taps are not materialized.
    // Flat order: input conv kernel, input conv bias, then per block the
    // gate conv kernel/bias and the 1x1 projection kernel/bias, then the
    // head kernel/bias. Kernel taps run row-major over the allowed offsets.
    std::size_t weight_count() const { return weights_.size(); }
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }

    // Deterministic mixture parameters for the image; outputs at raster
    // position t depend only on input pixels strictly before t.
    MixtureParams forward(const ComplexArray& x) const;

    // Weight file: "BPRIOR1" magic, text header, blank line, then raw
    // little-endian float64 in the flat layout order.
    void save(const std::string& path) const;
    static PriorNet load(const std::string& path, std::size_t expect_mixtures = 0);

private:
    friend struct NetOps;
    PriorNet() = default;
    PriorNetConfig cfg_;
    std::vector<double> weights_;
};

// -log g(x) normalized to bits per real-valued dimension (2*H*W dims).
double nll_bits_per_dim(const PriorNet& net, const ComplexArray& x,
                        const Discretization& disc);

// Exact reverse-mode gradients of image_loglik(x, forward(net, x)) with
// respect to every weight and to the input image (direct likelihood term
// plus the path through the network's causal context).
NetGradients backward(const PriorNet& net, const ComplexArray& x, const Discretization& disc);

// backward's input gradient with a per-pixel Bernoulli(1 - dropout_rate)
// mask, survivors scaled by 1/(1 - dropout_rate).
ComplexArray prior_grad(const PriorNet& net, const ComplexArray& x, const Discretization& disc,
                        double dropout_rate, Rng& rng);

// Adam on the per-batch mean NLL (bits/dim scale). Images are snapped to bin
// centers once at entry. Deterministic given cfg.seed.
TrainResult train(PriorNet& net, const std::vector<ComplexArray>& dataset,
                  const TrainConfig& cfg, const Discretization& disc);

// Raster-order autoregressive generation.
ComplexArray sample_image(const PriorNet& net, std::size_t h, std::size_t w,
                          const Discretization& disc, Rng& rng);

}  // namespace bmri
