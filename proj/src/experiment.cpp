#include "skyrm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace skyrm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double peak_value(const Image& img) {
    double m = 0.0;
    for (double v : img.data) m = std::max(m, v);
    return m;
}

/// Least-squares plane fit I ~ a*u + b*v + c over a window (u, v centered
/// pixel offsets); returns the residual standard deviation.
double plane_residual_std(const Image& img, int ci, int cj, int half) {
    double su2 = 0.0, sv2 = 0.0, suI = 0.0, svI = 0.0, sI = 0.0;
    int n = 0;
    for (int dj = -half; dj <= half; ++dj)
        for (int di = -half; di <= half; ++di) {
            const double v = img.at(ci + di, cj + dj);
            su2 += di * di;
            sv2 += dj * dj;
            suI += di * v;
            svI += dj * v;
            sI += v;
            ++n;
        }
    const double a = suI / su2;
    const double b = svI / sv2;
    const double c = sI / n;
    double ss = 0.0;
    for (int dj = -half; dj <= half; ++dj)
        for (int di = -half; di <= half; ++di) {
            const double r = img.at(ci + di, cj + dj) - (a * di + b * dj + c);
            ss += r * r;
        }
    const int dof = n - 3;
    return dof > 0 ? std::sqrt(ss / dof) : 0.0;
}

} // namespace

std::array<double, 2> intensity_centroid(const Image& img) {
    const double peak = peak_value(img);
    if (peak <= 0.0)
        throw std::runtime_error("intensity_centroid: all-dark image");
    const double threshold = 0.1 * peak;
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (int j = 0; j < img.grid.ny; ++j)
        for (int i = 0; i < img.grid.nx; ++i) {
            const double v = img.at(i, j);
            if (v < threshold) continue;
            sw += v;
            sx += v * i;
            sy += v * j;
        }
    return {sx / sw, sy / sw};
}

std::pair<MeasurementSet, CalibrationReport> calibrate_centers(const MeasurementSet& ms,
                                                               Proj reference) {
    CalibrationReport report;
    report.reference = reference;
    const auto ref_center = intensity_centroid(ms.at(reference));
    const double max_offset = 0.25 * std::min(ms.grid.nx, ms.grid.ny);

    MeasurementSet out;
    out.grid = ms.grid;
    out.bit_depth = ms.bit_depth;
    out.exposure = ms.exposure;

    double residual = 0.0;
    for (Proj p : all_projections) {
        const int q = static_cast<int>(p);
        if (p == reference) {
            report.offsets_px[q] = {0.0, 0.0};
            out.images[q] = ms.images[q];
            continue;
        }
        const auto c = intensity_centroid(ms.at(p));
        const double ox = c[0] - ref_center[0];
        const double oy = c[1] - ref_center[1];
        if (std::abs(ox) > max_offset || std::abs(oy) > max_offset)
            throw std::runtime_error(std::string("calibrate_centers: offset of ") +
                                     proj_name(p) + " exceeds a quarter of the grid");
        report.offsets_px[q] = {ox, oy};
        out.images[q] = shift_image(ms.images[q], -ox, -oy);

        const auto check = intensity_centroid(out.images[q]);
        residual = std::max(residual, std::hypot(check[0] - ref_center[0],
                                                 check[1] - ref_center[1]));
    }
    report.residual_px = residual;
    return {std::move(out), report};
}

UncertaintyMap estimate_uncertainty(const MeasurementSet& ms, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("estimate_uncertainty: window must be odd and >= 3");
    if (window > std::min(ms.grid.nx, ms.grid.ny))
        throw std::invalid_argument("estimate_uncertainty: window larger than grid");
    const int half = window / 2;
    const GridSpec& g = ms.grid;

    // sigma_I per image
    std::array<Image, 6> sigma_i;
    for (int q = 0; q < 6; ++q) {
        sigma_i[q] = Image(g);
#pragma omp parallel for schedule(static)
        for (int j = half; j < g.ny - half; ++j)
            for (int i = half; i < g.nx - half; ++i)
                sigma_i[q].at(i, j) = plane_residual_std(ms.images[q], i, j, half);
    }

    UncertaintyMap um;
    um.grid = g;
    um.sigma_mx = Image(g);
    um.sigma_my = Image(g);
    um.sigma_mz = Image(g);
    um.mask = Mask(g, 0);

    auto propagate = [&](Proj p1, Proj p2, Image& dst, int i, int j) {
        const double i1 = ms.at(p1).at(i, j);
        const double i2 = ms.at(p2).at(i, j);
        const double s1 = sigma_i[static_cast<int>(p1)].at(i, j);
        const double s2 = sigma_i[static_cast<int>(p2)].at(i, j);
        const double denom = i1 + i2;
        if (denom <= 0.0) return false;
        dst.at(i, j) = 2.0 * std::sqrt(i2 * i2 * s1 * s1 + i1 * i1 * s2 * s2) /
                       (denom * denom);
        return true;
    };

#pragma omp parallel for schedule(static)
    for (int j = half; j < g.ny - half; ++j)
        for (int i = half; i < g.nx - half; ++i) {
            const bool ok = propagate(Proj::X1, Proj::X2, um.sigma_mx, i, j) &&
                            propagate(Proj::Y1, Proj::Y2, um.sigma_my, i, j) &&
                            propagate(Proj::Z1, Proj::Z2, um.sigma_mz, i, j);
            if (ok) um.mask.at(i, j) = 1;
        }
    return um;
}

namespace {

/// First-order noise propagation through Sigma_z = M . (dxM x dyM) and the
/// disk integral, treating pixels as independent.
double propagate_sigma_n(const PoincareField& pf, const SkyrmionDensityField& sd,
                         const UncertaintyMap& um, std::array<double, 2> center,
                         double radius) {
    const GridSpec& g = pf.grid;
    const double r2 = radius * radius;
    const double inv2dx = 1.0 / (2.0 * g.dx);
    const double inv2dy = 1.0 / (2.0 * g.dy);
    std::vector<double> row_var(g.ny, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 1; j < g.ny - 1; ++j) {
        const double y = g.y(j) - center[1];
        for (int i = 1; i < g.nx - 1; ++i) {
            const double x = g.x(i) - center[0];
            if (x * x + y * y > r2) continue;
            if (!sd.mask.at(i, j) || !um.mask.at(i, j)) continue;
            const double mx = pf.mx.at(i, j), my = pf.my.at(i, j), mz = pf.mz.at(i, j);
            const double ax = (pf.mx.at(i + 1, j) - pf.mx.at(i - 1, j)) * inv2dx;
            const double ay = (pf.my.at(i + 1, j) - pf.my.at(i - 1, j)) * inv2dx;
            const double az = (pf.mz.at(i + 1, j) - pf.mz.at(i - 1, j)) * inv2dx;
            const double bx = (pf.mx.at(i, j + 1) - pf.mx.at(i, j - 1)) * inv2dy;
            const double by = (pf.my.at(i, j + 1) - pf.my.at(i, j - 1)) * inv2dy;
            const double bz = (pf.mz.at(i, j + 1) - pf.mz.at(i, j - 1)) * inv2dy;
            auto cross_norm2 = [](double ux, double uy, double uz, double vx,
                                  double vy, double vz) {
                const double cx = uy * vz - uz * vy;
                const double cy = uz * vx - ux * vz;
                const double cz = ux * vy - uy * vx;
                return cx * cx + cy * cy + cz * cz;
            };
            const double s2m = (um.sigma_mx.at(i, j) * um.sigma_mx.at(i, j) +
                                um.sigma_my.at(i, j) * um.sigma_my.at(i, j) +
                                um.sigma_mz.at(i, j) * um.sigma_mz.at(i, j)) /
                               3.0;
            const double s2a = s2m * 0.5 / (g.dx * g.dx); // centered-difference noise
            const double s2b = s2m * 0.5 / (g.dy * g.dy);
            const double var_sigma = cross_norm2(ax, ay, az, bx, by, bz) * s2m +
                                     cross_norm2(bx, by, bz, mx, my, mz) * s2a +
                                     cross_norm2(mx, my, mz, ax, ay, az) * s2b;
            row_var[j] += var_sigma;
        }
    }
    double total = 0.0;
    for (double v : row_var) total += v;
    const double cell = g.dx * g.dy / (4.0 * kPi);
    return cell * std::sqrt(total);
}

} // namespace

AnalysisOutput analyze(const MeasurementSet& ms, const PipelineOptions& opts) {
    AnalysisOutput out;

    const MeasurementSet* working = &ms;
    MeasurementSet calibrated;
    if (opts.calibrate) {
        try {
            auto [set, report] = calibrate_centers(ms);
            calibrated = std::move(set);
            out.calibration = report;
            working = &calibrated;
        } catch (const std::exception& e) {
            throw PipelineError("calibrate", e.what());
        }
    }

    try {
        out.poincare = reconstruct(*working, opts.floor_rel);
    } catch (const std::exception& e) {
        throw PipelineError("reconstruct", e.what());
    }

    try {
        out.density = skyrmion_density(out.poincare);
    } catch (const std::exception& e) {
        throw PipelineError("density", e.what());
    }

    const Image total = working->total_intensity();
    std::array<double, 2> center{0.0, 0.0};
    try {
        const auto c_px = intensity_centroid(working->at(Proj::Z2));
        center = {ms.grid.x(0) + c_px[0] * ms.grid.dx,
                  ms.grid.y(0) + c_px[1] * ms.grid.dy};
    } catch (const std::exception& e) {
        throw PipelineError("center", e.what());
    }
    out.center = center;

    double radius = opts.fixed_radius;
    if (radius <= 0.0) {
        try {
            radius = auto_radius(total, center, opts.eta);
        } catch (const std::exception& e) {
            throw PipelineError("auto_radius", e.what());
        }
    }

    try {
        out.result = skyrmion_number(out.density, center, radius);
    } catch (const std::exception& e) {
        throw PipelineError("integrate", e.what());
    }

    // Truncation estimate: sensitivity of N to pushing the ring out by 10%.
    const double outer =
        skyrmion_number_unchecked(out.density, center, 1.1 * radius).n_skyrmion;
    double sigma_trunc = std::abs(out.result.n_skyrmion - outer);

    double sigma_noise = 0.0;
    if (opts.with_uncertainty_map) {
        try {
            out.uncertainty = estimate_uncertainty(*working, opts.window);
            sigma_noise = propagate_sigma_n(out.poincare, out.density, out.uncertainty,
                                            center, radius);
        } catch (const std::exception& e) {
            throw PipelineError("uncertainty", e.what());
        }
    }
    out.result.uncertainty = std::hypot(sigma_trunc, sigma_noise);

    std::vector<double> radii = opts.radii;
    if (radii.empty()) {
        for (int k = 1; k <= 12; ++k) radii.push_back(radius * k / 10.0);
    }
    try {
        out.sweep = radius_sweep(out.density, center, radii);
    } catch (const std::exception& e) {
        throw PipelineError("sweep", e.what());
    }

    std::ostringstream prov;
    prov << "floor_rel=" << opts.floor_rel << " eta=" << opts.eta
         << " window=" << opts.window << " calibrate=" << (opts.calibrate ? 1 : 0);
    out.result.provenance = prov.str();
    return out;
}

} // namespace skyrm
