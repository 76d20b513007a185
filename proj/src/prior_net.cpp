#include "bmri/prior_net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

namespace bmri {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Plane {
    std::size_t c = 0, h = 0, w = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(std::size_t c_, std::size_t h_, std::size_t w_) : c(c_), h(h_), w(w_), v(c_ * h_ * w_, 0.0) {}
    double* row(std::size_t ci, std::size_t i) { return v.data() + (ci * h + i) * w; }
    const double* row(std::size_t ci, std::size_t i) const { return v.data() + (ci * h + i) * w; }
};

using Taps = std::vector<std::pair<int, int>>;

// Allowed offsets for the masked convolutions, row-major over the kernel
// grid. The strictly-causal variant excludes the center tap; both exclude
// everything at or after the center in raster order.
Taps make_taps(std::size_t kernel, bool include_center) {
    const int r = static_cast<int>(kernel) / 2;
    Taps taps;
    for (int dh = -r; dh <= 0; ++dh) {
        for (int dw = -r; dw <= r; ++dw) {
            const bool before_center = dh < 0 || (dh == 0 && dw < 0);
            if (before_center || (dh == 0 && dw == 0 && include_center))
                taps.emplace_back(dh, dw);
        }
    }
    return taps;
}

struct Segment {
    std::size_t offset = 0;
    std::size_t size = 0;
    bool is_kernel = false;
};

// Flat weight layout bookkeeping.
struct Layout {
    Taps taps_in;     // strictly causal
    Taps taps_block;  // center-inclusive
    Segment conv_in_w, conv_in_b;
    struct Block {
        Segment gate_w, gate_b, proj_w, proj_b;
    };
    std::vector<Block> blocks;
    Segment head_w, head_b;
    std::size_t total = 0;
    std::size_t width = 0, mixtures = 0;

    explicit Layout(const PriorNetConfig& cfg) {
        taps_in = make_taps(cfg.kernel, false);
        taps_block = make_taps(cfg.kernel, true);
        width = cfg.width;
        mixtures = cfg.mixtures;
        std::size_t off = 0;
        auto seg = [&off](std::size_t n, bool kernel) {
            Segment s{off, n, kernel};
            off += n;
            return s;
        };
        conv_in_w = seg(cfg.width * 2 * taps_in.size(), true);
        conv_in_b = seg(cfg.width, false);
        blocks.resize(cfg.blocks);
        for (auto& b : blocks) {
            b.gate_w = seg(2 * cfg.width * cfg.width * taps_block.size(), true);
            b.gate_b = seg(2 * cfg.width, false);
            b.proj_w = seg(cfg.width * cfg.width, true);
            b.proj_b = seg(cfg.width, false);
        }
        head_w = seg(6 * cfg.mixtures * cfg.width, true);
        head_b = seg(6 * cfg.mixtures, false);
        total = off;
    }
};

void validate_config(const PriorNetConfig& cfg) {
    if (cfg.blocks < 1) throw ValidationError("prior net: need at least one block");
    if (cfg.width < 1) throw ValidationError("prior net: width must be positive");
    if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
        throw ValidationError("prior net: kernel extent must be odd");
    if (cfg.mixtures < 1 || cfg.mixtures > 10)
        throw ValidationError("prior net: mixture count must be in [1, 10]");
    cfg.disc.validate();
}

// out[co] = b[co] + sum_{ci,taps} w * in[ci] shifted by the tap offset
void conv_fwd(const Plane& in, Plane& out, const double* w, const double* b, const Taps& taps) {
    const std::size_t h = in.h, wid = in.w, cin = in.c, cout = out.c;
    for (std::size_t co = 0; co < cout; ++co) {
        double* base = out.v.data() + co * h * wid;
        std::fill(base, base + h * wid, b[co]);
    }
    const std::size_t t_count = taps.size();
    for (std::size_t co = 0; co < cout; ++co) {
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const double* wk = w + (co * cin + ci) * t_count;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double wv = wk[t];
                if (wv == 0.0) continue;
                const int dh = taps[t].first, dw = taps[t].second;
                const std::size_t i0 = dh < 0 ? static_cast<std::size_t>(-dh) : 0;
                const std::size_t j0 = dw < 0 ? static_cast<std::size_t>(-dw) : 0;
                const std::size_t i1 = dh > 0 ? h - static_cast<std::size_t>(dh) : h;
                const std::size_t j1 = dw > 0 ? wid - static_cast<std::size_t>(dw) : wid;
                for (std::size_t i = i0; i < i1; ++i) {
                    const double* src = in.row(ci, i + dh) + (static_cast<long>(j0) + dw);
                    double* dst = out.row(co, i) + j0;
                    for (std::size_t j = 0; j < j1 - j0; ++j) dst[j] += wv * src[j];
                }
            }
        }
    }
}

// Reverse of conv_fwd: accumulates d_in, gw, gb from d_out.
void conv_bwd(const Plane& in, const Plane& d_out, Plane& d_in, const double* w, double* gw,
              double* gb, const Taps& taps) {
    const std::size_t h = in.h, wid = in.w, cin = in.c, cout = d_out.c;
    for (std::size_t co = 0; co < cout; ++co) {
        double acc = 0.0;
        const double* base = d_out.v.data() + co * h * wid;
        for (std::size_t n = 0; n < h * wid; ++n) acc += base[n];
        gb[co] += acc;
    }
    const std::size_t t_count = taps.size();
    for (std::size_t co = 0; co < cout; ++co) {
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const double* wk = w + (co * cin + ci) * t_count;
            double* gk = gw + (co * cin + ci) * t_count;
            for (std::size_t t = 0; t < t_count; ++t) {
                const int dh = taps[t].first, dw = taps[t].second;
                const std::size_t i0 = dh < 0 ? static_cast<std::size_t>(-dh) : 0;
                const std::size_t j0 = dw < 0 ? static_cast<std::size_t>(-dw) : 0;
                const std::size_t i1 = dh > 0 ? h - static_cast<std::size_t>(dh) : h;
                const std::size_t j1 = dw > 0 ? wid - static_cast<std::size_t>(dw) : wid;
                const double wv = wk[t];
                double acc = 0.0;
                for (std::size_t i = i0; i < i1; ++i) {
                    const double* src = in.row(ci, i + dh) + (static_cast<long>(j0) + dw);
                    double* dsrc = d_in.row(ci, i + dh) + (static_cast<long>(j0) + dw);
                    const double* dout = d_out.row(co, i) + j0;
                    for (std::size_t j = 0; j < j1 - j0; ++j) {
                        acc += dout[j] * src[j];
                        dsrc[j] += wv * dout[j];
                    }
                }
                gk[t] += acc;
            }
        }
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

// All per-pass state lives here; PriorNet itself stays immutable in use.
struct NetOps {
    struct Trace {
        Plane x2;
        Plane a0;
        std::vector<Plane> u, g, p, out;
        std::vector<std::vector<double>> dropmask;  // empty in eval mode
        Plane head;
        MixtureParams params;
    };

    static Trace run_forward(const PriorNet& net, const ComplexArray& x, double dropout_rate,
                             Rng* rng) {
        if (x.rank() != 2) throw ShapeError("prior net forward: expected a 2-D image");
        require_finite(x, "prior net forward");
        const Layout lay(net.cfg_);
        const std::size_t h = x.extent(0), w = x.extent(1);
        const std::size_t C = net.cfg_.width;
        const double* wt = net.weights_.data();

        Trace tr;
        tr.x2 = Plane(2, h, w);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                tr.x2.row(0, i)[j] = x.at(i, j).real();
                tr.x2.row(1, i)[j] = x.at(i, j).imag();
            }

        tr.a0 = Plane(C, h, w);
        conv_fwd(tr.x2, tr.a0, wt + lay.conv_in_w.offset, wt + lay.conv_in_b.offset, lay.taps_in);

        const std::size_t nb = net.cfg_.blocks;
        tr.u.resize(nb);
        tr.g.resize(nb);
        tr.p.resize(nb);
        tr.out.resize(nb);
        tr.dropmask.resize(nb);
        const bool training = dropout_rate > 0.0 && rng != nullptr;
        const double keep = 1.0 - dropout_rate;

        const Plane* cur = &tr.a0;
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& bl = lay.blocks[b];
            tr.u[b] = Plane(2 * C, h, w);
            conv_fwd(*cur, tr.u[b], wt + bl.gate_w.offset, wt + bl.gate_b.offset, lay.taps_block);
            tr.g[b] = Plane(C, h, w);
            for (std::size_t c = 0; c < C; ++c) {
                const double* ua = tr.u[b].v.data() + c * h * w;
                const double* ub = tr.u[b].v.data() + (C + c) * h * w;
                double* gv = tr.g[b].v.data() + c * h * w;
                for (std::size_t n = 0; n < h * w; ++n) gv[n] = std::tanh(ua[n]) * sigmoid(ub[n]);
            }
            tr.p[b] = Plane(C, h, w);
            conv_fwd(tr.g[b], tr.p[b], wt + bl.proj_w.offset, wt + bl.proj_b.offset, {{0, 0}});

            tr.out[b] = Plane(C, h, w);
            if (training) {
                tr.dropmask[b].resize(C * h * w);
                for (std::size_t n = 0; n < C * h * w; ++n)
                    tr.dropmask[b][n] = rng->uniform01() >= dropout_rate ? 1.0 / keep : 0.0;
                for (std::size_t n = 0; n < C * h * w; ++n)
                    tr.out[b].v[n] = cur->v[n] + tr.dropmask[b][n] * tr.p[b].v[n];
            } else {
                for (std::size_t n = 0; n < C * h * w; ++n)
                    tr.out[b].v[n] = cur->v[n] + tr.p[b].v[n];
            }
            cur = &tr.out[b];
        }

        tr.head = Plane(6 * net.cfg_.mixtures, h, w);
        conv_fwd(*cur, tr.head, wt + lay.head_w.offset, wt + lay.head_b.offset, {{0, 0}});

        // head channels -> (H,W,K,.) tensors
        const std::size_t K = net.cfg_.mixtures;
        MixtureParams mp(h, w, K);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j)
                for (std::size_t kk = 0; kk < K; ++kk) {
                    mp.pi_logits[mp.idx_k(i, j, kk)] = tr.head.row(kk, i)[j];
                    mp.mu[mp.idx_kc(i, j, kk, 0)] = tr.head.row(K + kk, i)[j];
                    mp.mu[mp.idx_kc(i, j, kk, 1)] = tr.head.row(2 * K + kk, i)[j];
                    mp.log_s[mp.idx_kc(i, j, kk, 0)] = tr.head.row(3 * K + kk, i)[j];
                    mp.log_s[mp.idx_kc(i, j, kk, 1)] = tr.head.row(4 * K + kk, i)[j];
                    mp.alpha[mp.idx_k(i, j, kk)] = tr.head.row(5 * K + kk, i)[j];
                }
        tr.params = std::move(mp);
        return tr;
    }

    // dparams: d objective / d mixture parameters. Accumulates weight grads
    // into gw (flat, pre-sized) and the network-path input gradient into gx.
    static void run_backward(const PriorNet& net, const Trace& tr, const MixtureParams& dparams,
                             std::vector<double>& gw, Plane* gx) {
        const Layout lay(net.cfg_);
        const std::size_t h = tr.x2.h, w = tr.x2.w;
        const std::size_t C = net.cfg_.width;
        const std::size_t K = net.cfg_.mixtures;
        const double* wt = net.weights_.data();

        Plane d_head(6 * K, h, w);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j)
                for (std::size_t kk = 0; kk < K; ++kk) {
                    d_head.row(kk, i)[j] = dparams.pi_logits[dparams.idx_k(i, j, kk)];
                    d_head.row(K + kk, i)[j] = dparams.mu[dparams.idx_kc(i, j, kk, 0)];
                    d_head.row(2 * K + kk, i)[j] = dparams.mu[dparams.idx_kc(i, j, kk, 1)];
                    d_head.row(3 * K + kk, i)[j] = dparams.log_s[dparams.idx_kc(i, j, kk, 0)];
                    d_head.row(4 * K + kk, i)[j] = dparams.log_s[dparams.idx_kc(i, j, kk, 1)];
                    d_head.row(5 * K + kk, i)[j] = dparams.alpha[dparams.idx_k(i, j, kk)];
                }

        const std::size_t nb = net.cfg_.blocks;
        const Plane& head_in = nb > 0 ? tr.out[nb - 1] : tr.a0;
        Plane d_cur(C, h, w);
        conv_bwd(head_in, d_head, d_cur, wt + lay.head_w.offset, gw.data() + lay.head_w.offset,
                 gw.data() + lay.head_b.offset, {{0, 0}});

        const bool training = !tr.dropmask.empty() && !tr.dropmask[0].empty();
        for (std::size_t b = nb; b-- > 0;) {
            const auto& bl = lay.blocks[b];
            const Plane& block_in = b == 0 ? tr.a0 : tr.out[b - 1];

            Plane d_p(C, h, w);
            if (training) {
                for (std::size_t n = 0; n < C * h * w; ++n)
                    d_p.v[n] = d_cur.v[n] * tr.dropmask[b][n];
            } else {
                d_p.v = d_cur.v;
            }
            Plane d_g(C, h, w);
            conv_bwd(tr.g[b], d_p, d_g, wt + bl.proj_w.offset, gw.data() + bl.proj_w.offset,
                     gw.data() + bl.proj_b.offset, {{0, 0}});

            Plane d_u(2 * C, h, w);
            for (std::size_t c = 0; c < C; ++c) {
                const double* ua = tr.u[b].v.data() + c * h * w;
                const double* ub = tr.u[b].v.data() + (C + c) * h * w;
                const double* dg = d_g.v.data() + c * h * w;
                double* da = d_u.v.data() + c * h * w;
                double* db = d_u.v.data() + (C + c) * h * w;
                for (std::size_t n = 0; n < h * w; ++n) {
                    const double t = std::tanh(ua[n]);
                    const double s = sigmoid(ub[n]);
                    da[n] = dg[n] * s * (1.0 - t * t);
                    db[n] = dg[n] * t * s * (1.0 - s);
                }
            }

            // residual: d(block input) gets d_cur plus the conv path
            Plane d_in(C, h, w);
            d_in.v = d_cur.v;
            conv_bwd(block_in, d_u, d_in, wt + bl.gate_w.offset, gw.data() + bl.gate_w.offset,
                     gw.data() + bl.gate_b.offset, lay.taps_block);
            d_cur = std::move(d_in);
        }

        Plane d_x2(2, h, w);
        conv_bwd(tr.x2, d_cur, d_x2, wt + lay.conv_in_w.offset, gw.data() + lay.conv_in_w.offset,
                 gw.data() + lay.conv_in_b.offset, lay.taps_in);
        if (gx != nullptr) *gx = std::move(d_x2);
    }
};

PriorNet PriorNet::init(const PriorNetConfig& cfg) {
    validate_config(cfg);
    const Layout lay(cfg);
    PriorNet net;
    net.cfg_ = cfg;
    net.weights_.assign(lay.total, 0.0);

    // truncated normal (|z| <= 2) std 0.05 on kernels, biases stay zero
    Rng rng(cfg.init_seed);
    auto fill_kernel = [&](const Segment& s) {
        for (std::size_t i = 0; i < s.size; ++i) {
            double z = rng.normal();
            while (std::abs(z) > 2.0) z = rng.normal();
            net.weights_[s.offset + i] = 0.05 * z;
        }
    };
    fill_kernel(lay.conv_in_w);
    for (const auto& b : lay.blocks) {
        fill_kernel(b.gate_w);
        fill_kernel(b.proj_w);
    }
    fill_kernel(lay.head_w);
    return net;
}

MixtureParams PriorNet::forward(const ComplexArray& x) const {
    return NetOps::run_forward(*this, x, 0.0, nullptr).params;
}

double nll_bits_per_dim(const PriorNet& net, const ComplexArray& x, const Discretization& disc) {
    const MixtureParams mp = net.forward(x);
    const double ll = image_loglik(x, mp, disc);
    const double dims = 2.0 * static_cast<double>(x.extent(0)) * static_cast<double>(x.extent(1));
    return -ll / (dims * kLn2);
}

NetGradients backward(const PriorNet& net, const ComplexArray& x, const Discretization& disc) {
    NetOps::Trace tr = NetOps::run_forward(net, x, 0.0, nullptr);
    MixtureParams gp;
    ComplexArray gx_direct;
    const double ll = image_loglik_grad(x, tr.params, disc, &gp, &gx_direct);

    NetGradients out;
    out.loglik = ll;
    out.weights.assign(net.weight_count(), 0.0);
    Plane gx_net;
    NetOps::run_backward(net, tr, gp, out.weights, &gx_net);

    out.input = std::move(gx_direct);
    const std::size_t h = x.extent(0), w = x.extent(1);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
            out.input.at(i, j) += cplx(gx_net.row(0, i)[j], gx_net.row(1, i)[j]);
    return out;
}

ComplexArray prior_grad(const PriorNet& net, const ComplexArray& x, const Discretization& disc,
                        double dropout_rate, Rng& rng) {
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ValidationError("prior_grad: dropout rate must lie in [0, 1)");
    ComplexArray g = backward(net, x, disc).input;
    if (dropout_rate == 0.0) return g;
    const double keep = 1.0 - dropout_rate;
    for (std::size_t n = 0; n < g.size(); ++n)
        g[n] = rng.uniform01() >= dropout_rate ? g[n] / keep : cplx(0.0, 0.0);
    return g;
}

TrainResult train(PriorNet& net, const std::vector<ComplexArray>& dataset, const TrainConfig& cfg,
                  const Discretization& disc) {
    if (dataset.empty()) throw ValidationError("train: dataset must be nonempty");
    if (cfg.batch_size < 1) throw ValidationError("train: batch size must be >= 1");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw ValidationError("train: dropout rate must lie in [0, 1)");
    for (const auto& img : dataset)
        if (!img.same_shape(dataset.front()))
            throw ShapeError("train: all images must share one shape");

    const std::size_t h = dataset.front().extent(0), w = dataset.front().extent(1);
    const double dims = 2.0 * static_cast<double>(h * w);

    // snap once to bin centers; the discretized likelihood is evaluated on
    // grid values during training
    std::vector<ComplexArray> data;
    data.reserve(dataset.size());
    for (const auto& img : dataset) {
        ComplexArray s = img;
        for (std::size_t n = 0; n < s.size(); ++n)
            s[n] = cplx(disc.snap(s[n].real()), disc.snap(s[n].imag()));
        data.push_back(std::move(s));
    }

    Rng root(cfg.seed);
    Rng shuffle_rng = root.fork(1);
    Rng dropout_rng = root.fork(2);

    const std::size_t nw = net.weight_count();
    std::vector<double> grad(nw), m(nw, 0.0), v(nw, 0.0);
    long t = 0;

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<std::size_t> perm = shuffle_rng.permutation(data.size());
        double epoch_sum = 0.0;
        std::size_t epoch_steps = 0;
        for (std::size_t start = 0; start < perm.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(perm.size(), start + cfg.batch_size);
            const double scale = -1.0 / (dims * kLn2 * static_cast<double>(stop - start));
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t n = start; n < stop; ++n) {
                const ComplexArray& img = data[perm[n]];
                NetOps::Trace tr = NetOps::run_forward(net, img, cfg.dropout_rate, &dropout_rng);
                MixtureParams gp;
                image_loglik_grad(img, tr.params, disc, &gp, nullptr);
                for (double& g : gp.pi_logits) g *= scale;
                for (double& g : gp.mu) g *= scale;
                for (double& g : gp.log_s) g *= scale;
                for (double& g : gp.alpha) g *= scale;
                NetOps::run_backward(net, tr, gp, grad, nullptr);
            }

            ++t;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
            std::vector<double>& wts = net.weights();
            for (std::size_t i = 0; i < nw; ++i) {
                m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
                v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
                wts[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
            }

            double bits = 0.0;
            for (std::size_t n = start; n < stop; ++n)
                bits += nll_bits_per_dim(net, data[perm[n]], disc);
            bits /= static_cast<double>(stop - start);
            result.step_bits.push_back(bits);
            epoch_sum += bits;
            ++epoch_steps;
        }
        result.epoch_bits.push_back(epoch_sum / static_cast<double>(epoch_steps));
    }
    return result;
}

ComplexArray sample_image(const PriorNet& net, std::size_t h, std::size_t w,
                          const Discretization& disc, Rng& rng) {
    ComplexArray img({h, w});
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const MixtureParams mp = net.forward(img);
            const auto [re, im] = sample_pixel(mp, i, j, disc, rng);
            img.at(i, j) = cplx(re, im);
        }
    }
    return img;
}

namespace {

void write_le_doubles(std::ostream& os, const std::vector<double>& vals) {
    for (double d : vals) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(d);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((u >> (8 * b)) & 0xFF);
        os.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

bool read_le_doubles(std::istream& is, std::vector<double>& vals) {
    for (double& d : vals) {
        unsigned char bytes[8];
        if (!is.read(reinterpret_cast<char*>(bytes), 8)) return false;
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        d = std::bit_cast<double>(u);
    }
    return true;
}

std::string fmt_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

}  // namespace

void PriorNet::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("prior net save: cannot open " + path);
    os << "BPRIOR1\n";
    os << "blocks " << cfg_.blocks << "\n";
    os << "width " << cfg_.width << "\n";
    os << "kernel " << cfg_.kernel << "\n";
    os << "mixtures " << cfg_.mixtures << "\n";
    os << "disc " << fmt_double(cfg_.disc.d) << " " << fmt_double(cfg_.disc.lo) << " "
       << fmt_double(cfg_.disc.hi) << "\n";
    os << "seed " << cfg_.init_seed << "\n";
    os << "weights " << weights_.size() << "\n";
    os << "\n";
    write_le_doubles(os, weights_);
    if (!os) throw IoError("prior net save: write failed for " + path);
}

PriorNet PriorNet::load(const std::string& path, std::size_t expect_mixtures) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("prior net load: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "BPRIOR1")
        throw FormatError("prior net load: bad magic");

    PriorNetConfig cfg;
    std::size_t claimed = 0;
    bool have_weights = false;
    while (std::getline(is, line)) {
        if (line.empty()) break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "blocks") ls >> cfg.blocks;
        else if (key == "width") ls >> cfg.width;
        else if (key == "kernel") ls >> cfg.kernel;
        else if (key == "mixtures") ls >> cfg.mixtures;
        else if (key == "disc") ls >> cfg.disc.d >> cfg.disc.lo >> cfg.disc.hi;
        else if (key == "seed") ls >> cfg.init_seed;
        else if (key == "weights") { ls >> claimed; have_weights = true; }
        else throw FormatError("prior net load: unknown header field '" + key + "'");
        if (ls.fail()) throw FormatError("prior net load: malformed header line '" + line + "'");
    }
    if (!have_weights) throw FormatError("prior net load: missing weight count");
    try {
        validate_config(cfg);
    } catch (const ValidationError& e) {
        throw FormatError(std::string("prior net load: invalid topology: ") + e.what());
    }
    const Layout lay(cfg);
    if (claimed != lay.total)
        throw FormatError("prior net load: weight count does not match topology");
    if (expect_mixtures != 0 && cfg.mixtures != expect_mixtures) {
        std::ostringstream os;
        os << "prior net load: mixture count mismatch (file has " << cfg.mixtures
           << ", expected " << expect_mixtures << ")";
        throw ValidationError(os.str());
    }

    PriorNet net;
    net.cfg_ = cfg;
    net.weights_.assign(lay.total, 0.0);
    if (!read_le_doubles(is, net.weights_))
        throw FormatError("prior net load: truncated weight payload");
    char extra;
    if (is.read(&extra, 1))
        throw FormatError("prior net load: trailing bytes after weight payload");
    for (double wv : net.weights_)
        if (!std::isfinite(wv)) throw FormatError("prior net load: non-finite weight");
    return net;
}

}  // namespace bmri
