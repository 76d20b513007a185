#include "bmri/fft.hpp"

#include <cmath>
#include <vector>

namespace bmri {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

// In-place iterative radix-2 Cooley-Tukey on a stride-1 buffer.
// sign = -1 for the forward transform, +1 for the inverse. No scaling here.
void fft1_inplace(cplx* a, std::size_t n, int sign) {
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

ComplexArray transform2(const ComplexArray& img, int sign) {
    if (img.rank() != 2) throw ShapeError("fft2: expected a 2-D array");
    const std::size_t h = img.extent(0), w = img.extent(1);
    if (!is_power_of_two(h) || !is_power_of_two(w))
        throw ShapeError("fft2: extents must be powers of two");

    ComplexArray out = img;
    // rows
    for (std::size_t i = 0; i < h; ++i) fft1_inplace(out.data() + i * w, w, sign);
    // columns, via a scratch buffer
    std::vector<cplx> col(h);
    for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t i = 0; i < h; ++i) col[i] = out.at(i, j);
        fft1_inplace(col.data(), h, sign);
        for (std::size_t i = 0; i < h; ++i) out.at(i, j) = col[i];
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));
    out *= scale;
    return out;
}

}  // namespace

ComplexArray fft2(const ComplexArray& img) { return transform2(img, -1); }
ComplexArray ifft2(const ComplexArray& img) { return transform2(img, +1); }

}  // namespace bmri
