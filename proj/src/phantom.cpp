#include "bmri/phantom.hpp"

#include <algorithm>
#include <cmath>

namespace bmri {

namespace {

struct Ellipse {
    double cx, cy;      // center, normalized [-1,1] coordinates
    double ax, ay;      // semi-axes
    double theta;       // rotation
    double intensity;
};

void render(const Ellipse& e, std::vector<double>& mag, std::size_t h, std::size_t w) {
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    for (std::size_t i = 0; i < h; ++i) {
        const double u = 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(h) - 1.0;
        for (std::size_t j = 0; j < w; ++j) {
            const double v = 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(w) - 1.0;
            const double du = u - e.cx, dv = v - e.cy;
            const double ru = (c * du + s * dv) / e.ax;
            const double rv = (-s * du + c * dv) / e.ay;
            if (ru * ru + rv * rv <= 1.0) mag[i * w + j] += e.intensity;
        }
    }
}

}  // namespace

std::vector<ComplexArray> generate_phantoms(const PhantomSpec& spec, std::size_t n) {
    if (n < 1) throw ValidationError("generate_phantoms: need n >= 1");
    if (spec.h == 0 || spec.w == 0) throw ShapeError("generate_phantoms: empty shape");
    if (!(spec.max_intensity >= spec.min_intensity) || !(spec.min_intensity > 0.0))
        throw ValidationError("generate_phantoms: bad intensity range");
    if (spec.n_ellipses < 1) throw ValidationError("generate_phantoms: need at least one ellipse");

    std::vector<ComplexArray> out;
    out.reserve(n);
    Rng root(spec.seed);
    for (std::size_t idx = 0; idx < n; ++idx) {
        Rng rng = root.fork(idx);
        std::vector<double> mag(spec.h * spec.w, 0.0);

        // a dominant central ellipse guarantees substantial support
        Ellipse main;
        main.cx = rng.uniform(-0.08, 0.08);
        main.cy = rng.uniform(-0.08, 0.08);
        main.ax = rng.uniform(0.55, 0.8);
        main.ay = rng.uniform(0.55, 0.8);
        main.theta = rng.uniform(0.0, M_PI);
        main.intensity = rng.uniform(spec.min_intensity, spec.max_intensity);
        render(main, mag, spec.h, spec.w);

        for (std::size_t e = 1; e < spec.n_ellipses; ++e) {
            Ellipse el;
            el.cx = rng.uniform(-0.55, 0.55);
            el.cy = rng.uniform(-0.55, 0.55);
            el.ax = rng.uniform(0.08, 0.35);
            el.ay = rng.uniform(0.08, 0.35);
            el.theta = rng.uniform(0.0, M_PI);
            // signed contributions carve darker internal structure
            const double sgn = rng.uniform01() < 0.35 ? -0.5 : 1.0;
            el.intensity = sgn * rng.uniform(spec.min_intensity, spec.max_intensity) * 0.5;
            render(el, mag, spec.h, spec.w);
        }

        double peak = 0.0;
        for (double& m : mag) {
            m = std::max(0.0, m);
            peak = std::max(peak, m);
        }
        if (peak > 1.0)
            for (double& m : mag) m /= peak;

        // smooth low-order polynomial phase, |phase| <= phase_amplitude
        double coef[5];
        double csum = 0.0;
        for (double& cc : coef) {
            cc = rng.uniform(-1.0, 1.0);
            csum += std::abs(cc);
        }
        const double pscale = csum > 0.0 ? spec.phase_amplitude / csum : 0.0;

        ComplexArray img({spec.h, spec.w});
        for (std::size_t i = 0; i < spec.h; ++i) {
            const double u = 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(spec.h) - 1.0;
            for (std::size_t j = 0; j < spec.w; ++j) {
                const double v =
                    2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(spec.w) - 1.0;
                const double ph =
                    pscale * (coef[0] * u + coef[1] * v + coef[2] * u * u + coef[3] * u * v +
                              coef[4] * v * v);
                const double m = mag[i * spec.w + j];
                img.at(i, j) = m * cplx(std::cos(ph), std::sin(ph));
            }
        }
        out.push_back(std::move(img));
    }
    return out;
}

void add_noise(ComplexArray& y, double std, Rng& rng) {
    if (std < 0.0) throw ValidationError("add_noise: std must be >= 0");
    if (std == 0.0) return;
    const double comp = std / std::sqrt(2.0);
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] += cplx(comp * rng.normal(), comp * rng.normal());
}

}  // namespace bmri
