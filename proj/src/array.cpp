#include "bmri/array.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bmri {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw ShapeError("array shape must have at least one extent");
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw ShapeError("array extents must be positive");
        n *= e;
    }
    return n;
}

}  // namespace

ComplexArray::ComplexArray(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_)) {}

ComplexArray::ComplexArray(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size())
        throw ShapeError("data length does not match product of extents");
}

std::size_t ComplexArray::extent(std::size_t axis) const {
    if (axis >= shape_.size()) throw ShapeError("axis out of range");
    return shape_[axis];
}

bool ComplexArray::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double ComplexArray::norm2() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

ComplexArray& ComplexArray::operator+=(const ComplexArray& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexArray& ComplexArray::operator-=(const ComplexArray& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexArray& ComplexArray::operator*=(cplx factor) {
    for (cplx& v : data_) v *= factor;
    return *this;
}

ComplexArray operator+(ComplexArray a, const ComplexArray& b) { return a += b; }
ComplexArray operator-(ComplexArray a, const ComplexArray& b) { return a -= b; }
ComplexArray operator*(cplx factor, ComplexArray a) { return a *= factor; }

cplx inner(const ComplexArray& a, const ComplexArray& b) {
    require_same_shape(a, b, "inner");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void axpy(cplx alpha, const ComplexArray& x, ComplexArray& y) {
    require_same_shape(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void require_same_shape(const ComplexArray& a, const ComplexArray& b, const char* where) {
    if (!a.same_shape(b)) {
        std::ostringstream os;
        os << where << ": shape mismatch";
        throw ShapeError(os.str());
    }
}

void require_finite(const ComplexArray& a, const char* where) {
    if (!a.all_finite()) {
        std::ostringstream os;
        os << where << ": non-finite value encountered";
        throw NumericalError(os.str());
    }
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform01_open() {
    double u = uniform01();
    while (u == 0.0) u = uniform01();
    return u;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ValidationError("Rng::below requires n >= 1");
    if (n == 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

double Rng::normal() {
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

std::uint64_t Rng::splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::fork(std::uint64_t stream_id) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream_id)));
}

}  // namespace bmri
