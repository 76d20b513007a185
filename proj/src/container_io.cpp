#include "bmri/container_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace bmri {

namespace {

void write_le_float(std::ostream& os, float f) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
    os.write(reinterpret_cast<const char*>(b), 4);
}

bool read_le_float(std::istream& is, float& f) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    std::uint32_t u = 0;
    for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    f = std::bit_cast<float>(u);
    return true;
}

}  // namespace

void write_cfl(const std::string& base, const ComplexArray& a) {
    {
        std::ofstream hdr(base + ".hdr");
        if (!hdr) throw IoError("write_cfl: cannot open " + base + ".hdr");
        hdr << "# Dimensions\n";
        std::vector<std::size_t> dims(a.shape().rbegin(), a.shape().rend());
        while (dims.size() < 3) dims.push_back(1);
        for (std::size_t i = 0; i < dims.size(); ++i) hdr << (i ? " " : "") << dims[i];
        hdr << "\n";
        if (!hdr) throw IoError("write_cfl: header write failed for " + base);
    }
    std::ofstream cfl(base + ".cfl", std::ios::binary);
    if (!cfl) throw IoError("write_cfl: cannot open " + base + ".cfl");
    for (std::size_t i = 0; i < a.size(); ++i) {
        write_le_float(cfl, static_cast<float>(a[i].real()));
        write_le_float(cfl, static_cast<float>(a[i].imag()));
    }
    if (!cfl) throw IoError("write_cfl: payload write failed for " + base);
}

ComplexArray read_cfl(const std::string& base) {
    std::ifstream hdr(base + ".hdr");
    if (!hdr) throw IoError("read_cfl: cannot open " + base + ".hdr");
    std::string line;
    if (!std::getline(hdr, line) || line.rfind("# Dimensions", 0) != 0)
        throw FormatError("read_cfl: missing '# Dimensions' header line");
    if (!std::getline(hdr, line)) throw FormatError("read_cfl: missing extents line");
    std::istringstream ls(line);
    std::vector<std::size_t> dims;
    long long e;
    while (ls >> e) {
        if (e <= 0) throw FormatError("read_cfl: extents must be positive");
        dims.push_back(static_cast<std::size_t>(e));
    }
    if (dims.empty()) throw FormatError("read_cfl: no extents");
    while (dims.size() > 1 && dims.back() == 1) dims.pop_back();
    std::vector<std::size_t> shape(dims.rbegin(), dims.rend());

    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;

    std::ifstream cfl(base + ".cfl", std::ios::binary);
    if (!cfl) throw IoError("read_cfl: cannot open " + base + ".cfl");
    std::vector<cplx> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        float re, im;
        if (!read_le_float(cfl, re) || !read_le_float(cfl, im))
            throw FormatError("read_cfl: payload shorter than the declared extents");
        data[i] = cplx(re, im);
    }
    char extra;
    if (cfl.read(&extra, 1))
        throw FormatError("read_cfl: payload longer than the declared extents");
    return ComplexArray(std::move(shape), std::move(data));
}

namespace {

void write_pgm(const std::string& path, const std::vector<unsigned char>& pix, std::size_t h,
               std::size_t w) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_pgm: cannot open " + path);
    os << "P5\n" << w << " " << h << "\n255\n";
    os.write(reinterpret_cast<const char*>(pix.data()), static_cast<long>(pix.size()));
    if (!os) throw IoError("write_pgm: write failed for " + path);
}

}  // namespace

void write_pgm_magnitude(const std::string& path, const ComplexArray& img) {
    if (img.rank() != 2) throw ShapeError("write_pgm_magnitude: expected a 2-D image");
    const std::size_t h = img.extent(0), w = img.extent(1);
    double lo = std::abs(img[0]), hi = lo;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double m = std::abs(img[i]);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::vector<unsigned char> pix(h * w);
    for (std::size_t i = 0; i < img.size(); ++i)
        pix[i] = static_cast<unsigned char>(std::lround((std::abs(img[i]) - lo) * scale));
    write_pgm(path, pix, h, w);
}

void write_pgm_phase(const std::string& path, const ComplexArray& img) {
    if (img.rank() != 2) throw ShapeError("write_pgm_phase: expected a 2-D image");
    const std::size_t h = img.extent(0), w = img.extent(1);
    std::vector<unsigned char> pix(h * w);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double ph = std::arg(img[i]);  // [-pi, pi]
        const double t = (ph + M_PI) / (2.0 * M_PI);
        pix[i] = static_cast<unsigned char>(std::clamp(std::lround(t * 255.0), 0L, 255L));
    }
    write_pgm(path, pix, h, w);
}

}  // namespace bmri
