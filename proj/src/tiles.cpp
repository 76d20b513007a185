#include "bmri/tiles.hpp"

namespace bmri {

ComplexArray circ_shift(const ComplexArray& img, long offset, std::size_t axis) {
    if (img.rank() != 2) throw ShapeError("circ_shift: expected a 2-D array");
    if (axis > 1) throw ShapeError("circ_shift: axis must be 0 or 1");
    const std::size_t h = img.extent(0), w = img.extent(1);
    const long n = static_cast<long>(axis == 0 ? h : w);
    std::size_t d = static_cast<std::size_t>(((offset % n) + n) % n);
    if (d == 0) return img;

    ComplexArray out(img.shape());
    if (axis == 0) {
        for (std::size_t i = 0; i < h; ++i) {
            const std::size_t src = (i + h - d) % h;
            for (std::size_t j = 0; j < w; ++j) out.at(i, j) = img.at(src, j);
        }
    } else {
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) out.at(i, j) = img.at(i, (j + w - d) % w);
    }
    return out;
}

std::vector<ComplexArray> patch_split(const ComplexArray& img, std::size_t patch) {
    if (img.rank() != 2) throw ShapeError("patch_split: expected a 2-D array");
    const std::size_t h = img.extent(0), w = img.extent(1);
    if (patch == 0 || h % patch != 0 || w % patch != 0)
        throw ShapeError("patch_split: patch must divide both extents");

    std::vector<ComplexArray> tiles;
    tiles.reserve((h / patch) * (w / patch));
    for (std::size_t ti = 0; ti < h / patch; ++ti) {
        for (std::size_t tj = 0; tj < w / patch; ++tj) {
            ComplexArray tile({patch, patch});
            for (std::size_t i = 0; i < patch; ++i)
                for (std::size_t j = 0; j < patch; ++j)
                    tile.at(i, j) = img.at(ti * patch + i, tj * patch + j);
            tiles.push_back(std::move(tile));
        }
    }
    return tiles;
}

ComplexArray patch_merge(const std::vector<ComplexArray>& tiles, std::size_t h, std::size_t w) {
    if (tiles.empty()) throw ShapeError("patch_merge: no tiles");
    const std::size_t patch = tiles[0].extent(0);
    if (tiles[0].extent(1) != patch) throw ShapeError("patch_merge: tiles must be square");
    if (patch == 0 || h % patch != 0 || w % patch != 0)
        throw ShapeError("patch_merge: patch must divide both extents");
    const std::size_t th = h / patch, tw = w / patch;
    if (tiles.size() != th * tw)
        throw ShapeError("patch_merge: tile count does not match target shape");

    ComplexArray out({h, w});
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        if (tiles[t].rank() != 2 || tiles[t].extent(0) != patch || tiles[t].extent(1) != patch)
            throw ShapeError("patch_merge: inconsistent tile shape");
        const std::size_t ti = t / tw, tj = t % tw;
        for (std::size_t i = 0; i < patch; ++i)
            for (std::size_t j = 0; j < patch; ++j)
                out.at(ti * patch + i, tj * patch + j) = tiles[t].at(i, j);
    }
    return out;
}

}  // namespace bmri
