#include "skyrm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skyrm {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x, y, z;
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double density_pixel(const PoincareField& pf, int i, int j) {
    const double inv2dx = 1.0 / (2.0 * pf.grid.dx);
    const double inv2dy = 1.0 / (2.0 * pf.grid.dy);
    const Vec3 m{pf.mx.at(i, j), pf.my.at(i, j), pf.mz.at(i, j)};
    const Vec3 ddx{(pf.mx.at(i + 1, j) - pf.mx.at(i - 1, j)) * inv2dx,
                   (pf.my.at(i + 1, j) - pf.my.at(i - 1, j)) * inv2dx,
                   (pf.mz.at(i + 1, j) - pf.mz.at(i - 1, j)) * inv2dx};
    const Vec3 ddy{(pf.mx.at(i, j + 1) - pf.mx.at(i, j - 1)) * inv2dy,
                   (pf.my.at(i, j + 1) - pf.my.at(i, j - 1)) * inv2dy,
                   (pf.mz.at(i, j + 1) - pf.mz.at(i, j - 1)) * inv2dy};
    return dot(m, cross(ddx, ddy));
}

inline bool stencil_valid(const PoincareField& pf, int i, int j) {
    return pf.valid(i, j) && pf.valid(i + 1, j) && pf.valid(i - 1, j) &&
           pf.valid(i, j + 1) && pf.valid(i, j - 1);
}

SkyrmionDensityField density_impl(const PoincareField& pf, bool parallel) {
    bool any = false;
    for (unsigned char m : pf.mask.data)
        if (m) { any = true; break; }
    if (!any)
        throw std::runtime_error("skyrmion_density: fully masked input");

    SkyrmionDensityField sd;
    sd.grid = pf.grid;
    sd.sigma_z = Image(pf.grid);
    sd.mask = Mask(pf.grid, 0);

    auto row = [&](int j) {
        for (int i = 1; i < pf.grid.nx - 1; ++i) {
            if (!stencil_valid(pf, i, j)) continue;
            sd.sigma_z.at(i, j) = density_pixel(pf, i, j);
            sd.mask.at(i, j) = 1;
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 1; j < pf.grid.ny - 1; ++j) row(j);
    } else {
        for (int j = 1; j < pf.grid.ny - 1; ++j) row(j);
    }
    return sd;
}

AnalysisResult integrate_disk(const SkyrmionDensityField& sd,
                              std::array<double, 2> center, double radius,
                              bool checked) {
    const GridSpec& g = sd.grid;
    if (checked && radius <= 2.0 * std::max(g.dx, g.dy))
        throw std::invalid_argument("skyrmion_number: radius must exceed 2 pixel pitches");

    const double r2 = radius * radius;
    // Per-row partial sums combined serially keeps the reduction order
    // independent of the thread count.
    std::vector<double> row_sum(g.ny, 0.0);
    std::vector<long> row_valid(g.ny, 0), row_total(g.ny, 0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j) - center[1];
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i) - center[0];
            if (x * x + y * y > r2) continue;
            ++row_total[j];
            if (!sd.mask.at(i, j)) continue;
            ++row_valid[j];
            row_sum[j] += sd.sigma_z.at(i, j);
        }
    }
    double sum = 0.0;
    long valid = 0, total = 0;
    for (int j = 0; j < g.ny; ++j) {
        sum += row_sum[j];
        valid += row_valid[j];
        total += row_total[j];
    }

    AnalysisResult res;
    res.integration_radius = radius;
    res.center = center;
    res.pixel_count = valid;
    res.coverage = total > 0 ? static_cast<double>(valid) / total : 0.0;
    res.n_skyrmion = sum * g.dx * g.dy / (4.0 * kPi);
    if (checked && res.coverage < 0.9)
        throw std::runtime_error("skyrmion_number: disk coverage " +
                                 std::to_string(res.coverage) + " below 0.9");
    if (checked && valid == 0)
        throw std::runtime_error("skyrmion_number: no valid pixels inside the disk");
    return res;
}

} // namespace

SkyrmionDensityField skyrmion_density(const PoincareField& pf) {
    return density_impl(pf, true);
}

namespace serial {
SkyrmionDensityField skyrmion_density(const PoincareField& pf) {
    return density_impl(pf, false);
}
} // namespace serial

AnalysisResult skyrmion_number(const SkyrmionDensityField& sd,
                               std::array<double, 2> center, double radius) {
    return integrate_disk(sd, center, radius, true);
}

AnalysisResult skyrmion_number_unchecked(const SkyrmionDensityField& sd,
                                         std::array<double, 2> center,
                                         double radius) {
    return integrate_disk(sd, center, radius, false);
}

double auto_radius(const Image& total_intensity, std::array<double, 2> center,
                   double eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("auto_radius: eta must lie in (0, 1)");
    const GridSpec& g = total_intensity.grid;
    double peak = 0.0;
    for (double v : total_intensity.data) peak = std::max(peak, v);
    if (peak <= 0.0)
        throw std::runtime_error("auto_radius: all-dark intensity image");
    const double cutoff = eta * peak;

    const double pitch = std::min(g.dx, g.dy);
    const double half_x = 0.5 * (g.nx - 1) * g.dx - std::abs(center[0] - g.cx);
    const double half_y = 0.5 * (g.ny - 1) * g.dy - std::abs(center[1] - g.cy);
    const double rmax = std::min(half_x, half_y);

    auto ring_mean = [&](double r) {
        const int n = std::max(64, static_cast<int>(std::ceil(2.0 * kPi * r / pitch)));
        double sum = 0.0;
        for (int s = 0; s < n; ++s) {
            const double phi = 2.0 * kPi * s / n;
            const double x = center[0] + r * std::cos(phi);
            const double y = center[1] + r * std::sin(phi);
            // nearest-pixel sample; rings are fine enough at pixel pitch
            const int i = std::clamp(
                static_cast<int>(std::lround((x - g.cx) / g.dx + 0.5 * (g.nx - 1))), 0,
                g.nx - 1);
            const int j = std::clamp(
                static_cast<int>(std::lround((y - g.cy) / g.dy + 0.5 * (g.ny - 1))), 0,
                g.ny - 1);
            sum += total_intensity.at(i, j);
        }
        return sum / n;
    };

    // take the outermost ring that still carries intensity above the
    // cutoff and step one pitch past it; scanning from the outside in is
    // what makes donut modes work, whose azimuthal mean dips below the
    // cutoff in the valley between the central spot and the outer ring
    if (ring_mean(rmax) >= cutoff)
        throw std::runtime_error(
            "auto_radius: intensity never falls below the cutoff inside the grid");
    for (double r = std::floor(rmax / pitch) * pitch; r >= pitch; r -= pitch) {
        if (ring_mean(r) >= cutoff) return std::min(r + pitch, rmax);
    }
    throw std::runtime_error("auto_radius: no ring above the cutoff");
}

std::vector<AnalysisResult> radius_sweep(const SkyrmionDensityField& sd,
                                         std::array<double, 2> center,
                                         const std::vector<double>& radii) {
    std::vector<AnalysisResult> out;
    out.reserve(radii.size());
    for (double r : radii) out.push_back(skyrmion_number_unchecked(sd, center, r));
    return out;
}

} // namespace skyrm
