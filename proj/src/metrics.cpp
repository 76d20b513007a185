#include "bmri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmri {

namespace {

std::vector<double> magnitude(const ComplexArray& a) {
    std::vector<double> m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::abs(a[i]);
    return m;
}

void check_pair(const ComplexArray& x, const ComplexArray& ref) {
    require_same_shape(x, ref, "metrics");
    if (x.rank() != 2) throw ShapeError("metrics: expected 2-D images");
    for (std::size_t i = 0; i < ref.size(); ++i)
        if (std::abs(ref[i]) != 0.0) return;
    throw ValidationError("metrics: reference image is all zero");
}

}  // namespace

double rmse_percent(const ComplexArray& x, const ComplexArray& ref) {
    check_pair(x, ref);
    const std::vector<double> mx = magnitude(x), mr = magnitude(ref);
    double err = 0.0, en = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        err += (mx[i] - mr[i]) * (mx[i] - mr[i]);
        en += mr[i] * mr[i];
    }
    return 100.0 * std::sqrt(err / en);
}

double psnr_db(const ComplexArray& x, const ComplexArray& ref) {
    check_pair(x, ref);
    const std::vector<double> mx = magnitude(x), mr = magnitude(ref);
    double err = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        err += (mx[i] - mr[i]) * (mx[i] - mr[i]);
        peak = std::max(peak, mr[i]);
    }
    const double rms = std::sqrt(err / static_cast<double>(mx.size()));
    if (rms == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak / rms);
}

double ssim_percent(const ComplexArray& x, const ComplexArray& ref) {
    check_pair(x, ref);
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    const std::size_t h = x.extent(0), w = x.extent(1);
    if (h < kWin || w < kWin)
        throw ValidationError("ssim: image smaller than the 11x11 window");

    double win[kWin][kWin];
    double wsum = 0.0;
    for (int a = 0; a < kWin; ++a)
        for (int b = 0; b < kWin; ++b) {
            const double da = a - kWin / 2, db = b - kWin / 2;
            win[a][b] = std::exp(-(da * da + db * db) / (2.0 * kSigma * kSigma));
            wsum += win[a][b];
        }
    for (auto& row : win)
        for (double& v : row) v /= wsum;

    const std::vector<double> mx = magnitude(x), mr = magnitude(ref);
    double peak = 0.0;
    for (double v : mr) peak = std::max(peak, v);
    const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + kWin <= h; ++i) {
        for (std::size_t j = 0; j + kWin <= w; ++j) {
            double m1 = 0, m2 = 0, q1 = 0, q2 = 0, q12 = 0;
            for (int a = 0; a < kWin; ++a)
                for (int b = 0; b < kWin; ++b) {
                    const double g = win[a][b];
                    const double v1 = mx[(i + a) * w + (j + b)];
                    const double v2 = mr[(i + a) * w + (j + b)];
                    m1 += g * v1;
                    m2 += g * v2;
                    q1 += g * v1 * v1;
                    q2 += g * v2 * v2;
                    q12 += g * v1 * v2;
                }
            const double var1 = q1 - m1 * m1;
            const double var2 = q2 - m2 * m2;
            const double cov = q12 - m1 * m2;
            acc += ((2 * m1 * m2 + c1) * (2 * cov + c2)) /
                   ((m1 * m1 + m2 * m2 + c1) * (var1 + var2 + c2));
            ++count;
        }
    }
    return 100.0 * acc / static_cast<double>(count);
}

}  // namespace bmri
