#ifndef SKYRM_GRID_HPP
#define SKYRM_GRID_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace skyrm {

/// Uniform 2-D sampling grid. Lengths are in units of the beam waist w0
/// unless stated otherwise. Pixel (i,j) maps to
///   x = cx + (i - (nx-1)/2) * dx,   y = cy + (j - (ny-1)/2) * dy.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate() const {
        if (nx < 8 || ny < 8)
            throw std::invalid_argument("GridSpec: nx and ny must be >= 8");
        if (!(dx > 0.0) || !(dy > 0.0))
            throw std::invalid_argument("GridSpec: dx and dy must be > 0");
    }

    double x(int i) const { return cx + (i - 0.5 * (nx - 1)) * dx; }
    double y(int j) const { return cy + (j - 0.5 * (ny - 1)) * dy; }

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * nx + i;
    }

    bool operator==(const GridSpec&) const = default;

    /// Square grid centered on the origin spanning [-extent, extent].
    static GridSpec centered(int n, double extent) {
        GridSpec g;
        g.nx = g.ny = n;
        g.dx = g.dy = 2.0 * extent / (n - 1);
        g.validate();
        return g;
    }
};

/// Row-major raster bound to a grid. Row j is a line of constant y.
template <typename T>
struct Raster {
    GridSpec grid;
    std::vector<T> data;

    Raster() = default;
    explicit Raster(const GridSpec& g, T fill = T{})
        : grid(g), data(g.size(), fill) {}

    T& at(int i, int j) { return data[grid.index(i, j)]; }
    const T& at(int i, int j) const { return data[grid.index(i, j)]; }
};

using Image = Raster<double>;
using Mask = Raster<unsigned char>;

/// Complex amplitude sampled on a grid (one LG mode or one polarization
/// component).
using ScalarField = Raster<std::complex<double>>;

} // namespace skyrm

#endif
