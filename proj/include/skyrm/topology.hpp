#ifndef SKYRM_TOPOLOGY_HPP
#define SKYRM_TOPOLOGY_HPP

#include "skyrm/grid.hpp"
#include "skyrm/polarimetry.hpp"

#include <string>
#include <vector>

namespace skyrm {

/// Topological density Sigma_z = M . (dM/dx x dM/dy) on the grid.
struct SkyrmionDensityField {
    GridSpec grid;
    Image sigma_z;
    Mask mask; ///< valid where the full centered stencil was valid
};

/// One skyrmion-number evaluation over a disk.
struct AnalysisResult {
    double n_skyrmion = 0.0;
    double uncertainty = 0.0;
    double integration_radius = 0.0;
    std::array<double, 2> center{0.0, 0.0};
    long pixel_count = 0;
    double coverage = 0.0; ///< valid pixels / disk pixels
    std::string provenance;
};

/// Centered second-order finite differences; pixels whose stencil touches
/// a masked or boundary pixel are masked out.
SkyrmionDensityField skyrmion_density(const PoincareField& pf);

namespace serial {
SkyrmionDensityField skyrmion_density(const PoincareField& pf);
}

/// N = (1/4pi) * sum of sigma_z * dx * dy over valid pixels inside the disk.
/// Throws when radius <= 2 pixel pitches or valid coverage < 90%.
AnalysisResult skyrmion_number(const SkyrmionDensityField& sd,
                               std::array<double, 2> center, double radius);

/// Like skyrmion_number but without the coverage/radius gates; used for
/// truncation estimates and sweeps near the mask edge.
AnalysisResult skyrmion_number_unchecked(const SkyrmionDensityField& sd,
                                         std::array<double, 2> center,
                                         double radius);

/// Smallest radius where the azimuthally averaged total intensity drops
/// below eta * global peak and stays below through 1.2 * r. Throws when
/// no such radius fits the grid.
double auto_radius(const Image& total_intensity, std::array<double, 2> center,
                   double eta = 1e-3);

std::vector<AnalysisResult> radius_sweep(const SkyrmionDensityField& sd,
                                         std::array<double, 2> center,
                                         const std::vector<double>& radii);

} // namespace skyrm

#endif
