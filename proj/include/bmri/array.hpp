#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "bmri/errors.hpp"

namespace bmri {

using cplx = std::complex<double>;

// N-dimensional row-major array of double-precision complex samples.
// The last extent varies fastest in memory.
class ComplexArray {
public:
    ComplexArray() = default;
    explicit ComplexArray(std::vector<std::size_t> shape);
    ComplexArray(std::vector<std::size_t> shape, std::vector<cplx> data);

    static ComplexArray zeros2d(std::size_t h, std::size_t w) {
        return ComplexArray({h, w});
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const;

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    // 2-D and 3-D accessors; callers are expected to respect the rank.
    cplx& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    cplx& at(std::size_t c, std::size_t i, std::size_t j) {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }
    const cplx& at(std::size_t c, std::size_t i, std::size_t j) const {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }

    bool same_shape(const ComplexArray& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    double norm2() const;

    ComplexArray& operator+=(const ComplexArray& other);
    ComplexArray& operator-=(const ComplexArray& other);
    ComplexArray& operator*=(cplx factor);

private:
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

ComplexArray operator+(ComplexArray a, const ComplexArray& b);
ComplexArray operator-(ComplexArray a, const ComplexArray& b);
ComplexArray operator*(cplx factor, ComplexArray a);

// <a,b> = sum conj(a_i) * b_i
cplx inner(const ComplexArray& a, const ComplexArray& b);

// y += alpha * x
void axpy(cplx alpha, const ComplexArray& x, ComplexArray& y);

void require_same_shape(const ComplexArray& a, const ComplexArray& b, const char* where);
void require_finite(const ComplexArray& a, const char* where);

// Deterministic random generator. The engine is std::mt19937_64 (its output
// stream is fully specified by the standard); the distributions below are
// hand-rolled on top of the raw 64-bit stream, so identical seeds give
// identical value streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0,1) with 53-bit resolution
    double uniform01();
    // strictly inside (0,1); re-draws on 0
    double uniform01_open();
    double uniform(double lo, double hi);
    // unbiased integer in [0,n), n >= 1, via rejection
    std::uint64_t below(std::uint64_t n);
    // standard normal via Box-Muller (no cached spare)
    double normal();
    // Fisher-Yates shuffle of indices [0,n)
    std::vector<std::size_t> permutation(std::size_t n);

    // Independent derived stream seeded by splitmix64 of (seed, stream_id).
    Rng fork(std::uint64_t stream_id) const;

    static std::uint64_t splitmix64(std::uint64_t x);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace bmri
