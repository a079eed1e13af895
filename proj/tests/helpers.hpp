#ifndef SKYRM_TEST_HELPERS_HPP
#define SKYRM_TEST_HELPERS_HPP

#include "skyrm/beam.hpp"
#include "skyrm/grid.hpp"
#include "skyrm/polarimetry.hpp"

#include <cmath>
#include <complex>
#include <functional>

namespace skyrm::test {

constexpr double kPi = 3.14159265358979323846;

/// Midpoint-rule norm of |amp|^2 over the grid.
inline double discrete_norm(const ScalarField& f) {
    double sum = 0.0;
    for (const auto& v : f.data) sum += std::norm(v);
    return sum * f.grid.dx * f.grid.dy;
}

/// Accumulated phase (in turns) of a complex field along a centered circle,
/// with bilinear interpolation of the complex amplitude.
inline double phase_winding(const ScalarField& f, double radius, int samples = 720) {
    const GridSpec& g = f.grid;
    auto sample = [&](double phi) {
        const double x = radius * std::cos(phi);
        const double y = radius * std::sin(phi);
        const double xp = (x - g.cx) / g.dx + 0.5 * (g.nx - 1);
        const double yp = (y - g.cy) / g.dy + 0.5 * (g.ny - 1);
        const int i0 = static_cast<int>(std::floor(xp));
        const int j0 = static_cast<int>(std::floor(yp));
        const double fx = xp - i0, fy = yp - j0;
        return (1 - fx) * (1 - fy) * f.at(i0, j0) + fx * (1 - fy) * f.at(i0 + 1, j0) +
               (1 - fx) * fy * f.at(i0, j0 + 1) + fx * fy * f.at(i0 + 1, j0 + 1);
    };
    double acc = 0.0;
    double prev = std::arg(sample(0.0));
    for (int s = 1; s <= samples; ++s) {
        const double ang = std::arg(sample(2.0 * kPi * s / samples));
        double d = ang - prev;
        while (d > kPi) d -= 2.0 * kPi;
        while (d <= -kPi) d += 2.0 * kPi;
        acc += d;
        prev = ang;
    }
    return acc / (2.0 * kPi);
}

/// Direct Pauli expectation of the normalized per-pixel state, in the
/// laboratory H/V frame. Pixels with zero total intensity get the mask bit 0.
inline PoincareField direct_expectation(const VectorBeam& beam) {
    const GridSpec& g = beam.grid();
    PoincareField pf;
    pf.grid = g;
    pf.mx = Image(g);
    pf.my = Image(g);
    pf.mz = Image(g);
    pf.mask = Mask(g, 0);
    const std::complex<double> phase(std::cos(beam.theta0), std::sin(beam.theta0));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto u0 = beam.compA.data[k];
        const auto u1 = beam.compB.data[k] * phase;
        const auto aH = beam.basis == BeamBasis::AOnH ? u0 : u1;
        const auto aV = beam.basis == BeamBasis::AOnH ? u1 : u0;
        const double w = std::norm(aH) + std::norm(aV);
        if (w <= 0.0) continue;
        const auto c = std::conj(aH) * aV;
        pf.mx.data[k] = 2.0 * c.real() / w;
        pf.my.data[k] = 2.0 * c.imag() / w;
        pf.mz.data[k] = (std::norm(aH) - std::norm(aV)) / w;
        pf.mask.data[k] = 1;
    }
    return pf;
}

/// Closed-form hedgehog texture with polar profile theta(r) and in-plane
/// azimuth m*phi + gamma; the classic unit-wrapping test field.
inline PoincareField hedgehog(const GridSpec& g, int m,
                              const std::function<double(double)>& theta,
                              double gamma = 0.0) {
    PoincareField pf;
    pf.grid = g;
    pf.mx = Image(g);
    pf.my = Image(g);
    pf.mz = Image(g);
    pf.mask = Mask(g, 1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            const double r = std::hypot(x, y);
            const double phi = std::atan2(y, x);
            const double th = theta(r);
            pf.mx.at(i, j) = std::sin(th) * std::cos(m * phi + gamma);
            pf.my.at(i, j) = std::sin(th) * std::sin(m * phi + gamma);
            pf.mz.at(i, j) = std::cos(th);
        }
    return pf;
}

} // namespace skyrm::test

#endif
