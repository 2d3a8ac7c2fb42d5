#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uscal {

// Pixel-to-mm scaling of the B-scan plane.
struct BScanGeometry {
    int width = 0;
    int height = 0;
    double s_x = 1.0;  // mm per pixel
    double s_y = 1.0;

    void validate() const;
};

// 8-bit grayscale B-scan, row-major.
struct BScanImage {
    BScanGeometry geometry;
    std::vector<std::uint8_t> pixels;

    BScanImage() = default;
    BScanImage(const BScanGeometry& g, std::uint8_t fill = 0)
        : geometry(g),
          pixels(static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height), fill) {}

    std::uint8_t& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * geometry.width + u]; }
    std::uint8_t at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * geometry.width + u]; }
    bool in_bounds(int u, int v) const {
        return u >= 0 && v >= 0 && u < geometry.width && v < geometry.height;
    }
};

// Binary (P5) PGM. Scale factors are not part of PGM; callers supply them.
BScanImage read_pgm(const std::string& path, double s_x = 1.0, double s_y = 1.0);
void write_pgm(const BScanImage& img, const std::string& path);

}  // namespace uscal
