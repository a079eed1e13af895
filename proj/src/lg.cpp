#include "skyrm/lg.hpp"

#include <cmath>
#include <stdexcept>

namespace skyrm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

struct ModeConstants {
    double w;        // w(z)
    double norm;     // sqrt(2/(pi |l|!)) / w(z)
    double inv_w2;   // 1 / w(z)^2
    double half_k_inv_r; // k / (2 R(z))
    double gouy;     // (|l|+1) * zeta(z)
    int l;
    int abs_l;
};

ModeConstants mode_constants(const LGModeSpec& spec) {
    ModeConstants c;
    c.l = spec.l;
    c.abs_l = std::abs(spec.l);
    c.w = spec.beam_radius();
    c.norm = std::sqrt(2.0 / (kPi * factorial(c.abs_l))) / c.w;
    c.inv_w2 = 1.0 / (c.w * c.w);
    const double k = 2.0 * kPi / spec.wavelength;
    c.half_k_inv_r = 0.5 * k * spec.inverse_curvature();
    c.gouy = (c.abs_l + 1) * spec.gouy_phase();
    return c;
}

inline std::complex<double> eval_pixel(const ModeConstants& c, double x, double y) {
    const double r2 = x * x + y * y;
    double radial = c.norm * std::exp(-r2 * c.inv_w2);
    if (c.abs_l > 0) {
        // (r sqrt(2) / w)^|l|; exactly zero on the vortex axis
        if (r2 == 0.0) return {0.0, 0.0};
        radial *= std::pow(std::sqrt(2.0 * r2) / c.w, c.abs_l);
    }
    const double phi = std::atan2(y, x);
    const double phase = c.l * phi + c.half_k_inv_r * r2 - c.gouy;
    return {radial * std::cos(phase), radial * std::sin(phase)};
}

} // namespace

double LGModeSpec::rayleigh_range() const {
    return kPi * w0 * w0 / wavelength;
}

double LGModeSpec::beam_radius() const {
    const double zr = rayleigh_range();
    return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

double LGModeSpec::gouy_phase() const {
    return std::atan(z / rayleigh_range());
}

double LGModeSpec::inverse_curvature() const {
    if (z == 0.0) return 0.0;
    const double zr = rayleigh_range();
    return z / (z * z + zr * zr);
}

void LGModeSpec::validate() const {
    if (p != 0)
        throw std::invalid_argument("LGModeSpec: only p = 0 modes are supported");
    if (!(w0 > 0.0) || !std::isfinite(w0))
        throw std::invalid_argument("LGModeSpec: w0 must be positive and finite");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw std::invalid_argument("LGModeSpec: wavelength must be positive and finite");
    if (!std::isfinite(z))
        throw std::invalid_argument("LGModeSpec: z must be finite");
}

ScalarField lg_mode(const LGModeSpec& spec, const GridSpec& grid) {
    spec.validate();
    grid.validate();
    const ModeConstants c = mode_constants(spec);
    ScalarField field(grid);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i)
            field.at(i, j) = eval_pixel(c, grid.x(i), y);
    }
    return field;
}

namespace serial {

ScalarField lg_mode(const LGModeSpec& spec, const GridSpec& grid) {
    spec.validate();
    grid.validate();
    const ModeConstants c = mode_constants(spec);
    ScalarField field(grid);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i)
            field.at(i, j) = eval_pixel(c, grid.x(i), y);
    }
    return field;
}

} // namespace serial

} // namespace skyrm
