#include "doctest.h"

#include <cmath>

#include "bmri/mixture.hpp"
#include "oracles.hpp"

using namespace bmri;

namespace {

MixtureParams random_params(std::size_t h, std::size_t w, std::size_t k, Rng& rng) {
    MixtureParams p(h, w, k);
    for (double& v : p.pi_logits) v = rng.uniform(-1.5, 1.5);
    for (double& v : p.mu) v = rng.uniform(-0.8, 0.8);
    for (double& v : p.log_s) v = rng.uniform(-4.0, 0.5);
    for (double& v : p.alpha) v = rng.uniform(-0.7, 0.7);
    return p;
}

// channel probability via the library's public scalar op, per pixel slice
double channel_prob(const MixtureParams& p, std::size_t i, std::size_t j, int chan, double v,
                    double mu_shift, const Discretization& disc) {
    std::vector<double> pi(p.k), mu(p.k), s(p.k);
    softmax(std::span<const double>(&p.pi_logits[p.idx_k(i, j, 0)], p.k),
            std::span<double>(pi.data(), p.k));
    for (std::size_t kk = 0; kk < p.k; ++kk) {
        mu[kk] = p.mu[p.idx_kc(i, j, kk, chan)] + (chan == 1 ? p.alpha[p.idx_k(i, j, kk)] * mu_shift : 0.0);
        s[kk] = std::exp(std::max(p.log_s[p.idx_kc(i, j, kk, chan)], kLogScaleFloor));
    }
    return discretized_channel_prob(v, pi, mu, s, disc);
}

}  // namespace

TEST_CASE("logistic cdf basics") {
    CHECK(logistic_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(logistic_cdf(1e8, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(logistic_cdf(std::log(3.0), 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(logistic_cdf(2.0 + 0.5 * std::log(3.0), 2.0, 0.5) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(logistic_cdf(0.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(logistic_cdf(0.0, 0.0, -1.0), ValidationError);
}

TEST_CASE("discretized channel probability: frozen scalar value") {
    // K=1, pi=1, mu=0, s=1, v=0, d=2/255: 2*sigma(d/2) - 1
    Discretization disc;
    const double pi1[] = {1.0}, mu1[] = {0.0}, s1[] = {1.0};
    const double p = discretized_channel_prob(0.0, pi1, mu1, s1, disc);
    const double expected = 2.0 / (1.0 + std::exp(-1.0 / 255.0)) - 1.0;
    CHECK(p == doctest::Approx(expected).epsilon(1e-12));
    CHECK(p == doctest::Approx(1.9608e-3).epsilon(1e-4));
}

TEST_CASE("discretized channel probability: normalization over all bins") {
    Discretization disc;
    Rng rng(21);
    for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{10}}) {
        MixtureParams p = random_params(1, 1, k, rng);
        double sum = 0.0;
        for (std::size_t b = 0; b < disc.bin_count(); ++b)
            sum += channel_prob(p, 0, 0, 0, disc.bin_center(b), 0.0, disc);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("discretized channel probability: mixture degeneracy and validation") {
    Discretization disc;
    const double pi2[] = {0.5, 0.5}, mu2[] = {0.2, 0.2}, s2[] = {0.7, 0.7};
    const double pi1[] = {1.0}, mu1[] = {0.2}, s1[] = {0.7};
    const double a = discretized_channel_prob(0.3, pi2, mu2, s2, disc);
    const double b = discretized_channel_prob(0.3, pi1, mu1, s1, disc);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));

    CHECK_THROWS_AS(discretized_channel_prob(1.5, pi1, mu1, s1, disc), ValidationError);
    const double sbad[] = {0.0};
    CHECK_THROWS_AS(discretized_channel_prob(0.0, pi1, mu1, sbad, disc), ValidationError);
}

TEST_CASE("channel probability grows as scale shrinks toward the value's bin") {
    Discretization disc;
    const double pi1[] = {1.0};
    const double mu1[] = {disc.snap(0.2)};
    double prev = 0.0;
    for (double s = 1.0; s >= 0.01; s *= 0.5) {
        const double s1[] = {s};
        const double p = discretized_channel_prob(disc.snap(0.2), pi1, mu1, s1, disc);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("pixel joint logprob: decoupled and substitution cases") {
    Discretization disc;
    Rng rng(22);
    MixtureParams p = random_params(1, 1, 3, rng);
    for (double& a : p.alpha) a = 0.0;
    const double re = disc.snap(0.31), im = disc.snap(-0.44);
    const double joint = pixel_joint_logprob(re, im, p, 0, 0, disc);
    const double pr = channel_prob(p, 0, 0, 0, re, 0.0, disc);
    const double pi = channel_prob(p, 0, 0, 1, im, 0.0, disc);
    CHECK(joint == doctest::Approx(std::log(pr) + std::log(pi)).epsilon(1e-12));

    // K=1, alpha=1: imaginary channel shifted by re
    MixtureParams q(1, 1, 1);
    q.alpha[0] = 1.0;
    q.mu[1] = 0.0;  // mu_im
    const double re2 = disc.snap(0.3);
    const double joint2 = pixel_joint_logprob(re2, disc.snap(0.1), q, 0, 0, disc);
    const double pr2 = channel_prob(q, 0, 0, 0, re2, 0.0, disc);
    const double pim2 = channel_prob(q, 0, 0, 1, disc.snap(0.1), re2, disc);
    CHECK(joint2 == doctest::Approx(std::log(pr2) + std::log(pim2)).epsilon(1e-12));
}

TEST_CASE("pixel joint distribution normalizes over all bin pairs") {
    Discretization disc;
    Rng rng(23);
    MixtureParams p = random_params(1, 1, 3, rng);
    double sum = 0.0;
    for (std::size_t a = 0; a < disc.bin_count(); ++a) {
        const double re = disc.bin_center(a);
        double row = 0.0;
        for (std::size_t b = 0; b < disc.bin_count(); ++b)
            row += std::exp(pixel_joint_logprob(re, disc.bin_center(b), p, 0, 0, disc));
        sum += row;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("image loglik: additivity and naive-loop oracle") {
    Discretization disc;
    Rng rng(24);

    MixtureParams p1 = random_params(1, 1, 2, rng);
    ComplexArray x1({1, 1});
    x1.at(0, 0) = cplx(disc.snap(0.2), disc.snap(-0.6));
    CHECK(image_loglik(x1, p1, disc) ==
          doctest::Approx(pixel_joint_logprob(disc.snap(0.2), disc.snap(-0.6), p1, 0, 0, disc))
              .epsilon(1e-14));

    // identical params and values: 4x the single-pixel value
    MixtureParams p4(2, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t kk = 0; kk < 2; ++kk) {
                p4.pi_logits[p4.idx_k(i, j, kk)] = p1.pi_logits[kk];
                p4.alpha[p4.idx_k(i, j, kk)] = p1.alpha[kk];
                for (std::size_t c = 0; c < 2; ++c) {
                    p4.mu[p4.idx_kc(i, j, kk, c)] = p1.mu[2 * kk + c];
                    p4.log_s[p4.idx_kc(i, j, kk, c)] = p1.log_s[2 * kk + c];
                }
            }
    ComplexArray x4({2, 2}, std::vector<cplx>(4, x1.at(0, 0)));
    CHECK(image_loglik(x4, p4, disc) ==
          doctest::Approx(4.0 * image_loglik(x1, p1, disc)).epsilon(1e-13));

    // naive per-pixel loop oracle on a random 3x3 case
    MixtureParams p9 = random_params(3, 3, 3, rng);
    ComplexArray x9({3, 3});
    for (std::size_t i = 0; i < 9; ++i)
        x9[i] = cplx(disc.snap(rng.uniform(-1, 1)), disc.snap(rng.uniform(-1, 1)));
    double naive = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            naive += pixel_joint_logprob(x9.at(i, j).real(), x9.at(i, j).imag(), p9, i, j, disc);
    CHECK(image_loglik(x9, p9, disc) == doctest::Approx(naive).epsilon(1e-13));

    CHECK_THROWS_AS(image_loglik(ComplexArray({2, 3}), p9, disc), ShapeError);
}

TEST_CASE("analytic parameter gradients match central finite differences") {
    Discretization disc;
    Rng rng(25);
    MixtureParams p = random_params(3, 3, 3, rng);
    ComplexArray x({3, 3});
    for (std::size_t i = 0; i < 9; ++i)
        x[i] = cplx(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9));

    MixtureParams grad;
    ComplexArray gx;
    image_loglik_grad(x, p, disc, &grad, &gx);

    const double h = 1e-5;
    const double scale = image_loglik(x, p, disc);
    auto fd_check = [&](std::vector<double>& field, const std::vector<double>& gfield) {
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t i = rng.below(field.size());
            const double keep = field[i];
            field[i] = keep + h;
            const double up = image_loglik(x, p, disc);
            field[i] = keep - h;
            const double dn = image_loglik(x, p, disc);
            field[i] = keep;
            const double fd = (up - dn) / (2.0 * h);
            CHECK(oracle::fd_match(fd, gfield[i], 1e-5, scale, h));
        }
    };
    fd_check(p.pi_logits, grad.pi_logits);
    fd_check(p.mu, grad.mu);
    fd_check(p.log_s, grad.log_s);
    fd_check(p.alpha, grad.alpha);

    // value gradients (continuous in v)
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = rng.below(x.size());
        const bool real_part = rng.uniform01() < 0.5;
        const cplx keep = x[n];
        const cplx dir = real_part ? cplx(1, 0) : cplx(0, 1);
        x[n] = keep + h * dir;
        const double up = image_loglik(x, p, disc);
        x[n] = keep - h * dir;
        const double dn = image_loglik(x, p, disc);
        x[n] = keep;
        const double fd = (up - dn) / (2.0 * h);
        const double analytic = real_part ? gx[n].real() : gx[n].imag();
        CHECK(oracle::fd_match(fd, analytic, 1e-5, scale, h));
    }
}

TEST_CASE("gradient trivial cases") {
    Discretization disc;
    // K=1: softmax of one logit is constant -> zero pi gradient
    MixtureParams p(1, 1, 1);
    p.mu[0] = 0.1;
    p.mu[1] = -0.2;
    ComplexArray x({1, 1});
    x.at(0, 0) = cplx(disc.snap(0.4), disc.snap(0.0));
    MixtureParams g = loglik_grad_params(x, p, disc);
    CHECK(g.pi_logits[0] == 0.0);

    // symmetric case v == mu, K=1: d(bin prob)/d mu == 0
    MixtureParams ps(1, 1, 1);
    const double v = disc.snap(0.2);
    ps.mu[0] = v;
    ComplexArray xs({1, 1});
    xs.at(0, 0) = cplx(v, 0.0);
    MixtureParams gs = loglik_grad_params(xs, ps, disc);
    CHECK(std::abs(gs.mu[0]) < 1e-15);
}

TEST_CASE("sample_pixel degenerate scales and histogram consistency") {
    Discretization disc;
    Rng rng(26);

    // tiny scales collapse onto the means
    MixtureParams p(1, 1, 1);
    p.mu[0] = 0.32;   // re
    p.mu[1] = -0.54;  // im
    p.log_s[0] = p.log_s[1] = -30.0;  // clamped to the floor, s ~ 9e-4 -> wait, floor is -7
    // the clamp floor keeps s = e^-7 ~ 9.1e-4; still well under a bin width? d/2 ~ 3.9e-3
    for (int t = 0; t < 50; ++t) {
        auto [re, im] = sample_pixel(p, 0, 0, disc, rng);
        CHECK(std::abs(re - disc.snap(0.32)) <= 2.0 * disc.d);
        CHECK(std::abs(im - disc.snap(-0.54)) <= 2.0 * disc.d);
    }

    // K=1, alpha=1, tiny imaginary scale: im tracks mu_im + re
    MixtureParams pa(1, 1, 1);
    pa.mu[0] = 0.0;
    pa.mu[1] = 0.1;
    pa.log_s[0] = 0.0;    // s_re = 1, wide
    pa.log_s[1] = -30.0;  // im collapses
    pa.alpha[0] = 1.0;
    for (int t = 0; t < 50; ++t) {
        auto [re, im] = sample_pixel(pa, 0, 0, disc, rng);
        CHECK(std::abs(im - disc.snap(0.1 + re)) <= 2.0 * disc.d);
    }

    // empirical real-channel histogram vs analytic bin masses
    MixtureParams ph(1, 1, 2);
    ph.pi_logits[0] = 0.3;
    ph.pi_logits[1] = -0.4;
    ph.mu[ph.idx_kc(0, 0, 0, 0)] = -0.3;
    ph.mu[ph.idx_kc(0, 0, 1, 0)] = 0.45;
    ph.log_s[ph.idx_kc(0, 0, 0, 0)] = std::log(0.08);
    ph.log_s[ph.idx_kc(0, 0, 1, 0)] = std::log(0.05);
    const int draws = 200000;
    std::vector<int> hist(disc.bin_count(), 0);
    for (int t = 0; t < draws; ++t) {
        auto [re, im] = sample_pixel(ph, 0, 0, disc, rng);
        ++hist[disc.bin_index(re)];
    }
    std::vector<double> pi(2), mu(2), s(2);
    softmax(std::span<const double>(ph.pi_logits.data(), 2), std::span<double>(pi.data(), 2));
    for (std::size_t kk = 0; kk < 2; ++kk) {
        mu[kk] = ph.mu[ph.idx_kc(0, 0, kk, 0)];
        s[kk] = std::exp(ph.log_s[ph.idx_kc(0, 0, kk, 0)]);
    }
    int checked = 0;
    for (std::size_t b = 0; b < disc.bin_count(); ++b) {
        const double prob = discretized_channel_prob(disc.bin_center(b), pi, mu, s, disc);
        if (prob < 1e-4) continue;
        const double expect = prob * draws;
        const double sigma = std::sqrt(draws * prob * (1.0 - prob));
        CHECK(std::abs(hist[b] - expect) <= 4.0 * sigma + 1.0);
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("discretization bookkeeping") {
    Discretization disc;
    CHECK(disc.bin_count() == 256);
    CHECK(disc.bin_center(0) == doctest::Approx(-1.0));
    CHECK(disc.bin_center(255) == doctest::Approx(1.0));
    CHECK(disc.snap(-2.0) == doctest::Approx(-1.0));
    CHECK(disc.snap(2.0) == doctest::Approx(1.0));
    for (std::size_t b : {std::size_t{0}, std::size_t{17}, std::size_t{255}})
        CHECK(disc.bin_index(disc.bin_center(b)) == b);

    Discretization bad;
    bad.d = 0.3;  // (hi-lo)/d not integral
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
