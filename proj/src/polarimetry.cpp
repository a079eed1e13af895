#include "skyrm/polarimetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace skyrm {

namespace {

constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

struct SixIntensities {
    double v[6];
};

// Unnormalized lab-frame amplitudes already carry the total-intensity
// weight w = |u0|^2 + |u1|^2, so |<s|psi_tilde>|^2 is the CCD-style image.
inline SixIntensities project_pixel(cplx u0, cplx u1, cplx phase, BeamBasis basis) {
    const cplx b = u1 * phase;
    const cplx aH = (basis == BeamBasis::AOnH) ? u0 : b;
    const cplx aV = (basis == BeamBasis::AOnH) ? b : u0;
    const cplx d = (aH + aV) / std::sqrt(2.0);
    const cplx a = (aH - aV) / std::sqrt(2.0);
    const cplx l = (aH - cplx(0.0, 1.0) * aV) / std::sqrt(2.0);
    const cplx r = (aH + cplx(0.0, 1.0) * aV) / std::sqrt(2.0);
    SixIntensities out;
    out.v[static_cast<int>(Proj::X1)] = std::norm(d);
    out.v[static_cast<int>(Proj::X2)] = std::norm(a);
    out.v[static_cast<int>(Proj::Y1)] = std::norm(l);
    out.v[static_cast<int>(Proj::Y2)] = std::norm(r);
    out.v[static_cast<int>(Proj::Z1)] = std::norm(aH);
    out.v[static_cast<int>(Proj::Z2)] = std::norm(aV);
    return out;
}

double peak_value(const Image& img) {
    double m = 0.0;
    for (double v : img.data) m = std::max(m, v);
    return m;
}

inline double bilinear(const Image& img, double x_px, double y_px, bool& ok) {
    const int nx = img.grid.nx, ny = img.grid.ny;
    const int i0 = static_cast<int>(std::floor(x_px));
    const int j0 = static_cast<int>(std::floor(y_px));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= nx || j0 + 1 >= ny) {
        ok = false;
        return 0.0;
    }
    ok = true;
    const double fx = x_px - i0, fy = y_px - j0;
    return (1 - fx) * (1 - fy) * img.at(i0, j0) + fx * (1 - fy) * img.at(i0 + 1, j0) +
           (1 - fx) * fy * img.at(i0, j0 + 1) + fx * fy * img.at(i0 + 1, j0 + 1);
}

inline bool mask_bilinear_ok(const Mask& mask, double x_px, double y_px) {
    const int i0 = static_cast<int>(std::floor(x_px));
    const int j0 = static_cast<int>(std::floor(y_px));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= mask.grid.nx || j0 + 1 >= mask.grid.ny)
        return false;
    return mask.at(i0, j0) && mask.at(i0 + 1, j0) && mask.at(i0, j0 + 1) &&
           mask.at(i0 + 1, j0 + 1);
}

} // namespace

const char* proj_name(Proj p) {
    static const char* names[6] = {"Ix1", "Ix2", "Iy1", "Iy2", "Iz1", "Iz2"};
    return names[static_cast<int>(p)];
}

Image MeasurementSet::total_intensity() const {
    Image total(grid);
    const Image& z1 = at(Proj::Z1);
    const Image& z2 = at(Proj::Z2);
    for (std::size_t k = 0; k < total.data.size(); ++k)
        total.data[k] = z1.data[k] + z2.data[k];
    return total;
}

MeasurementSet project_intensities(const VectorBeam& beam) {
    if (beam.compA.grid != beam.compB.grid)
        throw std::invalid_argument("project_intensities: component grids differ");
    const GridSpec& grid = beam.grid();
    MeasurementSet ms;
    ms.grid = grid;
    for (auto& img : ms.images) img = Image(grid);
    const cplx phase(std::cos(beam.theta0), std::sin(beam.theta0));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t k = grid.index(i, j);
            const SixIntensities s =
                project_pixel(beam.compA.data[k], beam.compB.data[k], phase, beam.basis);
            for (int q = 0; q < 6; ++q) ms.images[q].data[k] = s.v[q];
        }
    }
    return ms;
}

namespace serial {
MeasurementSet project_intensities(const VectorBeam& beam) {
    if (beam.compA.grid != beam.compB.grid)
        throw std::invalid_argument("project_intensities: component grids differ");
    const GridSpec& grid = beam.grid();
    MeasurementSet ms;
    ms.grid = grid;
    for (auto& img : ms.images) img = Image(grid);
    const cplx phase(std::cos(beam.theta0), std::sin(beam.theta0));
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t k = grid.index(i, j);
            const SixIntensities s =
                project_pixel(beam.compA.data[k], beam.compB.data[k], phase, beam.basis);
            for (int q = 0; q < 6; ++q) ms.images[q].data[k] = s.v[q];
        }
    }
    return ms;
}
} // namespace serial

Image shift_image(const Image& img, double sx, double sy) {
    Image out(img.grid);
    if (sx == 0.0 && sy == 0.0) {
        out.data = img.data;
        return out;
    }
#pragma omp parallel for schedule(static)
    for (int j = 0; j < img.grid.ny; ++j) {
        for (int i = 0; i < img.grid.nx; ++i) {
            bool ok = false;
            const double v = bilinear(img, i - sx, j - sy, ok);
            out.at(i, j) = ok ? v : 0.0;
        }
    }
    return out;
}

MeasurementSet degrade(const MeasurementSet& ms, const DegradeParams& params) {
    if (params.noise_rel < 0.0)
        throw std::invalid_argument("degrade: noise_rel must be non-negative");
    if (params.bit_depth != 8 && params.bit_depth != 16)
        throw std::invalid_argument("degrade: bit_depth must be 8 or 16");
    const double max_shift = 0.25 * std::min(ms.grid.nx, ms.grid.ny);
    for (const auto& s : params.shifts_px)
        if (std::abs(s[0]) > max_shift || std::abs(s[1]) > max_shift)
            throw std::invalid_argument("degrade: shift exceeds a quarter of the grid");

    MeasurementSet out;
    out.grid = ms.grid;
    out.bit_depth = params.bit_depth;
    out.exposure = ms.exposure;

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Noise is drawn serially in a fixed image/pixel order so that a seed
    // pins the entire output.
    for (int q = 0; q < 6; ++q) {
        Image img = shift_image(ms.images[q], params.shifts_px[q][0],
                                params.shifts_px[q][1]);
        if (params.noise_rel > 0.0) {
            const double sigma = params.noise_rel * peak_value(img);
            for (double& v : img.data) v += sigma * gauss(rng);
        }
        for (double& v : img.data) v = std::max(v, 0.0);
        out.images[q] = std::move(img);
    }

    double global_peak = 0.0;
    for (const auto& img : out.images) global_peak = std::max(global_peak, peak_value(img));
    const double levels = static_cast<double>((1u << params.bit_depth) - 1);
    const double scale = global_peak > 0.0 ? levels / global_peak : 0.0;
    for (auto& img : out.images)
        for (double& v : img.data) v = std::round(v * scale);
    return out;
}

namespace {

PoincareField reconstruct_impl(const MeasurementSet& ms, double floor_rel, bool parallel) {
    if (floor_rel < 0.0)
        throw std::invalid_argument("reconstruct: floor_rel must be non-negative");
    const GridSpec& grid = ms.grid;
    const Image& z1 = ms.at(Proj::Z1);
    const Image& z2 = ms.at(Proj::Z2);
    double zpeak = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        zpeak = std::max(zpeak, z1.data[k] + z2.data[k]);
    if (zpeak <= 0.0)
        throw std::runtime_error("reconstruct: empty mask (all-dark image set)");
    const double floor_abs = floor_rel * zpeak;

    PoincareField pf;
    pf.grid = grid;
    pf.mx = Image(grid);
    pf.my = Image(grid);
    pf.mz = Image(grid);
    pf.mask = Mask(grid, 0);

    auto pixel = [&](std::size_t k) {
        const double dz = z1.data[k] + z2.data[k];
        const double dx = ms.at(Proj::X1).data[k] + ms.at(Proj::X2).data[k];
        const double dy = ms.at(Proj::Y1).data[k] + ms.at(Proj::Y2).data[k];
        if (dz < floor_abs || dz <= 0.0 || dx <= 0.0 || dy <= 0.0) return;
        auto ratio = [](double a, double b) {
            return std::clamp((a - b) / (a + b), -1.0, 1.0);
        };
        pf.mx.data[k] = ratio(ms.at(Proj::X1).data[k], ms.at(Proj::X2).data[k]);
        pf.my.data[k] = ratio(ms.at(Proj::Y1).data[k], ms.at(Proj::Y2).data[k]);
        pf.mz.data[k] = ratio(z1.data[k], z2.data[k]);
        pf.mask.data[k] = 1;
    };

    const long n = static_cast<long>(grid.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long k = 0; k < n; ++k) pixel(static_cast<std::size_t>(k));
    } else {
        for (long k = 0; k < n; ++k) pixel(static_cast<std::size_t>(k));
    }

    bool any = false;
    for (unsigned char m : pf.mask.data)
        if (m) { any = true; break; }
    if (!any)
        throw std::runtime_error("reconstruct: empty mask (all-dark image set)");
    return pf;
}

} // namespace

PoincareField reconstruct(const MeasurementSet& ms, double floor_rel) {
    return reconstruct_impl(ms, floor_rel, true);
}

namespace serial {
PoincareField reconstruct(const MeasurementSet& ms, double floor_rel) {
    return reconstruct_impl(ms, floor_rel, false);
}
} // namespace serial

SphericalDecomposition spherical_decompose(const PoincareField& pf,
                                           double loop_radius, double center_x,
                                           double center_y) {
    const GridSpec& g = pf.grid;
    if (!(loop_radius > 0.0))
        throw std::invalid_argument("spherical_decompose: loop radius must be positive");
    const double pitch = std::min(g.dx, g.dy);
    auto to_px = [&](double x, double y, double& xp, double& yp) {
        xp = (x - g.cx) / g.dx + 0.5 * (g.nx - 1);
        yp = (y - g.cy) / g.dy + 0.5 * (g.ny - 1);
    };

    SphericalDecomposition out;
    const double rmax = 0.5 * std::min((g.nx - 1) * g.dx, (g.ny - 1) * g.dy);

    for (double r = pitch; r < rmax; r += pitch) {
        const int n = std::max(64, static_cast<int>(std::ceil(2.0 * kPi * r / pitch)));
        double sum = 0.0;
        int count = 0;
        for (int s = 0; s < n; ++s) {
            const double phi = 2.0 * kPi * s / n;
            double xp, yp;
            to_px(center_x + r * std::cos(phi), center_y + r * std::sin(phi), xp, yp);
            if (!mask_bilinear_ok(pf.mask, xp, yp)) continue;
            bool ok = false;
            const double mz = bilinear(pf.mz, xp, yp, ok);
            if (!ok) continue;
            sum += std::acos(std::clamp(mz, -1.0, 1.0));
            ++count;
        }
        out.radii.push_back(r);
        out.theta_profile.push_back(count > 0 ? sum / count
                                              : std::numeric_limits<double>::quiet_NaN());
    }

    // Winding of Phi = atan2(My, Mx) around the requested loop.
    const int n = std::max(256, static_cast<int>(std::ceil(2.0 * kPi * loop_radius / pitch)));
    double accumulated = 0.0;
    double prev = 0.0;
    for (int s = 0; s <= n; ++s) {
        const double phi = 2.0 * kPi * s / n;
        double xp, yp;
        to_px(center_x + loop_radius * std::cos(phi),
              center_y + loop_radius * std::sin(phi), xp, yp);
        if (!mask_bilinear_ok(pf.mask, xp, yp))
            throw std::runtime_error("spherical_decompose: loop crosses masked pixels");
        bool ok = false;
        const double mx = bilinear(pf.mx, xp, yp, ok);
        const double my = bilinear(pf.my, xp, yp, ok);
        if (std::abs(mx) + std::abs(my) < 1e-9)
            throw std::runtime_error(
                "spherical_decompose: in-plane component vanishes on the loop");
        const double ang = std::atan2(my, mx);
        if (s > 0) {
            double d = ang - prev;
            while (d > kPi) d -= 2.0 * kPi;
            while (d <= -kPi) d += 2.0 * kPi;
            accumulated += d;
        }
        prev = ang;
    }
    out.phi_winding = static_cast<int>(std::lround(accumulated / (2.0 * kPi)));
    return out;
}

} // namespace skyrm
