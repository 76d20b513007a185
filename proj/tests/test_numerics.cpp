#include "doctest.h"

#include <cmath>

#include "bmri/array.hpp"
#include "bmri/cg.hpp"
#include "bmri/fft.hpp"
#include "bmri/nudft.hpp"
#include "bmri/tiles.hpp"
#include "oracles.hpp"

using namespace bmri;

TEST_CASE("complex array invariants") {
    CHECK_THROWS_AS(ComplexArray({0, 4}), ShapeError);
    CHECK_THROWS_AS(ComplexArray({2, 2}, std::vector<cplx>(3)), ShapeError);
    ComplexArray a({2, 3});
    CHECK(a.size() == 6);
    a.at(1, 2) = cplx(1.0, -2.0);
    CHECK(a[5] == cplx(1.0, -2.0));
    CHECK(a.all_finite());
    a[0] = cplx(std::nan(""), 0.0);
    CHECK_FALSE(a.all_finite());
}

TEST_CASE("rng determinism and distribution sanity") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng r(7);
    double mean = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) mean += r.normal();
    mean /= n;
    CHECK(std::abs(mean) < 0.02);

    Rng f1 = Rng(9).fork(3), f2 = Rng(9).fork(3), f3 = Rng(9).fork(4);
    CHECK(f1.next_u64() == f2.next_u64());
    CHECK(f1.next_u64() != f3.next_u64());

    // permutation is a permutation
    Rng p(5);
    auto perm = p.permutation(50);
    std::vector<bool> seen(50, false);
    for (auto v : perm) seen[v] = true;
    for (bool s : seen) CHECK(s);
}

TEST_CASE("fft2 trivial examples") {
    // constant image: DC = 2, rest 0
    ComplexArray ones({2, 2}, std::vector<cplx>(4, cplx(1.0, 0.0)));
    ComplexArray k = fft2(ones);
    CHECK(std::abs(k.at(0, 0) - cplx(2.0, 0.0)) < 1e-14);
    CHECK(std::abs(k.at(0, 1)) < 1e-14);
    CHECK(std::abs(k.at(1, 0)) < 1e-14);
    CHECK(std::abs(k.at(1, 1)) < 1e-14);

    // unit impulse at origin: flat spectrum 0.5
    ComplexArray imp({2, 2});
    imp.at(0, 0) = 1.0;
    ComplexArray ki = fft2(imp);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(ki[i] - cplx(0.5, 0.0)) < 1e-14);
}

TEST_CASE("fft2 unitarity, round trip, naive-DFT agreement") {
    Rng rng(11);
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {4, 16}, {16, 4}, {64, 64}}) {
        ComplexArray x = oracle::random_image(h, w, rng);
        ComplexArray k = fft2(x);
        CHECK(std::abs(k.norm2() - x.norm2()) <= 1e-12 * x.norm2());
        ComplexArray back = ifft2(k);
        back -= x;
        CHECK(back.norm2() <= 1e-12 * x.norm2());
        if (h <= 16 && w <= 16) {
            ComplexArray ref = oracle::dft2_naive(x, -1);
            ref -= k;
            CHECK(ref.norm2() <= 1e-11 * x.norm2());
        }
    }
}

TEST_CASE("fft2 adjoint pairing") {
    Rng rng(12);
    ComplexArray x = oracle::random_image(16, 8, rng);
    ComplexArray y = oracle::random_image(16, 8, rng);
    const cplx lhs = inner(fft2(x), y);
    const cplx rhs = inner(x, ifft2(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * x.norm2() * y.norm2());
}

TEST_CASE("fft2 rejects unsupported sizes") {
    CHECK_THROWS_AS(fft2(ComplexArray({3, 4})), ShapeError);
    CHECK_THROWS_AS(fft2(ComplexArray({4, 6})), ShapeError);
    CHECK_THROWS_AS(fft2(ComplexArray({8})), ShapeError);
}

TEST_CASE("nudft matches fft2 on the full grid") {
    Rng rng(13);
    ComplexArray x = oracle::random_image(8, 8, rng);
    Trajectory grid = full_grid_trajectory(8, 8);
    ComplexArray s = nudft_forward(x, grid);
    ComplexArray k = fft2(x);
    double err = 0.0;
    for (std::size_t u = 0; u < 8; ++u)
        for (std::size_t v = 0; v < 8; ++v) err += std::norm(s[u * 8 + v] - k.at(u, v));
    CHECK(std::sqrt(err) <= 1e-10 * x.norm2());

    // adjoint on the full grid equals ifft2
    ComplexArray samples({64});
    for (std::size_t i = 0; i < 64; ++i) samples[i] = oracle::random_image(1, 1, rng)[0];
    ComplexArray img = nudft_adjoint(samples, grid, 8, 8);
    ComplexArray kk({8, 8});
    for (std::size_t u = 0; u < 8; ++u)
        for (std::size_t v = 0; v < 8; ++v) kk.at(u, v) = samples[u * 8 + v];
    ComplexArray ref = ifft2(kk);
    ref -= img;
    CHECK(ref.norm2() <= 1e-10 * samples.norm2());
}

TEST_CASE("nudft dc sample and constant image") {
    ComplexArray c({4, 4}, std::vector<cplx>(16, cplx(0.7, -0.2)));
    Trajectory t;
    t.kx = {0.0};
    t.ky = {0.0};
    ComplexArray s = nudft_forward(c, t);
    CHECK(std::abs(s[0] - cplx(0.7, -0.2) * 4.0) < 1e-12);  // c * sqrt(HW)

    ComplexArray one({1});
    one[0] = 1.0;
    ComplexArray img = nudft_adjoint(one, t, 4, 4);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(img[i] - cplx(0.25, 0.0)) < 1e-14);
}

TEST_CASE("nudft against double-loop oracle and adjoint pairing") {
    Rng rng(14);
    ComplexArray x = oracle::random_image(6, 6, rng);
    Trajectory t;
    for (int m = 0; m < 20; ++m) {
        t.kx.push_back(rng.uniform(-0.5, 0.4999));
        t.ky.push_back(rng.uniform(-0.5, 0.4999));
    }
    ComplexArray s = nudft_forward(x, t);
    ComplexArray ref = oracle::nudft_naive(x, t);
    ref -= s;
    CHECK(ref.norm2() <= 1e-12 * x.norm2());

    ComplexArray y({t.size()});
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const cplx lhs = inner(s, y);
    const cplx rhs = inner(x, nudft_adjoint(y, t, 6, 6));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * x.norm2() * y.norm2());
}

TEST_CASE("nudft validation") {
    Trajectory bad;
    bad.kx = {0.5};
    bad.ky = {0.0};
    ComplexArray x({4, 4});
    CHECK_THROWS_AS(nudft_forward(x, bad), ValidationError);
    Trajectory ok;
    ok.kx = {0.0, 0.1};
    ok.ky = {0.0, 0.1};
    ComplexArray wrong({3});
    CHECK_THROWS_AS(nudft_adjoint(wrong, ok, 4, 4), ShapeError);
}

TEST_CASE("cg identity and diagonal systems") {
    ComplexArray rhs({3});
    rhs[0] = 1.0;
    rhs[1] = 1.0;
    rhs[2] = 1.0;
    auto ident = [](const ComplexArray& v) { return v; };
    CgResult r = cg_solve(ident, rhs, 1e-12, 10);
    CHECK(r.status == CgStatus::Converged);
    CHECK(r.iterations == 1);
    ComplexArray d = r.x - rhs;
    CHECK(d.norm2() < 1e-12);

    auto diag = [](const ComplexArray& v) {
        ComplexArray o = v;
        o[1] *= 2.0;
        o[2] *= 4.0;
        return o;
    };
    CgResult r2 = cg_solve(diag, rhs, 1e-12, 10);
    CHECK(r2.status == CgStatus::Converged);
    CHECK(std::abs(r2.x[0] - cplx(1.0, 0.0)) < 1e-10);
    CHECK(std::abs(r2.x[1] - cplx(0.5, 0.0)) < 1e-10);
    CHECK(std::abs(r2.x[2] - cplx(0.25, 0.0)) < 1e-10);
}

TEST_CASE("cg random hermitian positive-definite vs dense oracle") {
    Rng rng(15);
    const std::size_t n = 16;
    // A = B^H B + I on 16x16
    std::vector<std::vector<cplx>> b(n, std::vector<cplx>(n));
    for (auto& row : b)
        for (auto& v : row) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a[i][j] += std::conj(b[k][i]) * b[k][j];
            if (i == j) a[i][j] += 1.0;
        }
    ComplexArray rhs({n});
    for (std::size_t i = 0; i < n; ++i) rhs[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));

    auto apply = [&](const ComplexArray& v) {
        ComplexArray o({n});
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a[i][j] * v[j];
            o[i] = acc;
        }
        return o;
    };
    CgResult r = cg_solve(apply, rhs, 1e-12, 200);
    CHECK(r.status == CgStatus::Converged);

    std::vector<cplx> bb(n);
    for (std::size_t i = 0; i < n; ++i) bb[i] = rhs[i];
    std::vector<cplx> ref = oracle::dense_solve(a, bb);
    double err = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(r.x[i] - ref[i]);
        nrm += std::norm(ref[i]);
    }
    CHECK(std::sqrt(err / nrm) <= 1e-8);
}

TEST_CASE("cg zero rhs and stall reporting") {
    ComplexArray zero({4});
    auto ident = [](const ComplexArray& v) { return v; };
    CgResult r = cg_solve(ident, zero, 1e-10, 5);
    CHECK(r.status == CgStatus::Converged);
    CHECK(r.x.norm2() == 0.0);

    // singular map with inconsistent rhs: must stall, not blow up
    auto zero_map = [](const ComplexArray& v) { return ComplexArray(v.shape()); };
    ComplexArray rhs({4});
    rhs[0] = 1.0;
    CgResult r2 = cg_solve(zero_map, rhs, 1e-10, 50);
    CHECK(r2.status == CgStatus::Stalled);
    CHECK(r2.x.all_finite());
}

TEST_CASE("circ_shift examples and round trip") {
    ComplexArray col({4, 1});
    col.at(0, 0) = 1.0;
    col.at(1, 0) = 2.0;
    col.at(2, 0) = 3.0;
    col.at(3, 0) = 4.0;
    ComplexArray s = circ_shift(col, 1, 0);
    CHECK(s.at(0, 0) == cplx(4.0, 0.0));
    CHECK(s.at(1, 0) == cplx(1.0, 0.0));
    CHECK(s.at(2, 0) == cplx(2.0, 0.0));
    CHECK(s.at(3, 0) == cplx(3.0, 0.0));

    Rng rng(16);
    ComplexArray x = oracle::random_image(8, 8, rng);
    for (long d : {0L, 3L, 8L, -5L, 19L}) {
        for (std::size_t axis : {0u, 1u}) {
            ComplexArray back = circ_shift(circ_shift(x, d, axis), -d, axis);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == x[i]);
        }
    }
    // offset == extent is the identity
    ComplexArray same = circ_shift(x, 8, 0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(same[i] == x[i]);
}

TEST_CASE("patch split and merge") {
    Rng rng(17);
    ComplexArray x = oracle::random_image(4, 4, rng);
    auto tiles = patch_split(x, 2);
    CHECK(tiles.size() == 4);
    ComplexArray back = patch_merge(tiles, 4, 4);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == x[i]);

    // patch == extent: single tile equal to input
    auto whole = patch_split(x, 4);
    CHECK(whole.size() == 1);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(whole[0][i] == x[i]);

    // tile (1,1) of a 6x6 split with patch 3 is the lower-right block
    ComplexArray y = oracle::random_image(6, 6, rng);
    auto t6 = patch_split(y, 3);
    CHECK(t6.size() == 4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(t6[3].at(i, j) == y.at(3 + i, 3 + j));

    CHECK_THROWS_AS(patch_split(y, 4), ShapeError);
    CHECK_THROWS_AS(patch_merge(t6, 6, 8), ShapeError);
}
