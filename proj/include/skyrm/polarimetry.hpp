#ifndef SKYRM_POLARIMETRY_HPP
#define SKYRM_POLARIMETRY_HPP

#include "skyrm/beam.hpp"
#include "skyrm/grid.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skyrm {

/// The six analyzer projections, paired per Pauli axis:
/// (x1,x2) = (D,A), (y1,y2) = (L,R), (z1,z2) = (H,V).
enum class Proj : int { X1 = 0, X2, Y1, Y2, Z1, Z2 };

constexpr std::array<Proj, 6> all_projections = {
    Proj::X1, Proj::X2, Proj::Y1, Proj::Y2, Proj::Z1, Proj::Z2};

const char* proj_name(Proj p); ///< "Ix1" ... "Iz2"

/// Six co-registered non-negative intensity images plus grid metadata.
struct MeasurementSet {
    GridSpec grid;
    std::array<Image, 6> images;
    std::optional<int> bit_depth; ///< set when quantized (8 or 16)
    std::string exposure;         ///< free-form provenance

    Image& at(Proj p) { return images[static_cast<int>(p)]; }
    const Image& at(Proj p) const { return images[static_cast<int>(p)]; }

    /// I_z1 + I_z2 per pixel (equals any other pair sum for pure states).
    Image total_intensity() const;
};

/// Per-pixel Poincare vector with a validity mask.
struct PoincareField {
    GridSpec grid;
    Image mx, my, mz;
    Mask mask;

    bool valid(int i, int j) const { return mask.at(i, j) != 0; }
};

/// Intensities behind the six analyzers, weighted by the local total
/// intensity |u0|^2 + |u1|^2 so the images look like CCD frames.
MeasurementSet project_intensities(const VectorBeam& beam);

namespace serial {
MeasurementSet project_intensities(const VectorBeam& beam);
}

/// CCD degradation surrogate: per-image translation (bilinear), additive
/// Gaussian noise (sigma = noise_rel * per-image peak), clamp at zero,
/// quantize to bit_depth against the global peak. Deterministic per seed.
struct DegradeParams {
    double noise_rel = 0.0;
    int bit_depth = 16;
    std::array<std::array<double, 2>, 6> shifts_px{}; ///< (dx,dy) per image, pixels
    std::uint64_t seed = 0;
};

MeasurementSet degrade(const MeasurementSet& ms, const DegradeParams& params);

/// Stokes reconstruction M_i = (I_i1 - I_i2) / (I_i1 + I_i2), clamped to
/// [-1,1]. Pixels whose z-pair denominator is below floor_rel times the
/// peak z-pair sum are masked out. Throws if the mask comes out empty.
PoincareField reconstruct(const MeasurementSet& ms, double floor_rel = 1e-3);

namespace serial {
PoincareField reconstruct(const MeasurementSet& ms, double floor_rel = 1e-3);
}

/// Spherical-angle view of a Poincare field around a centered loop.
struct SphericalDecomposition {
    std::vector<double> radii;         ///< ring radii sampled at pixel pitch
    std::vector<double> theta_profile; ///< azimuthal mean of arccos(M_z)
    int phi_winding = 0;               ///< net turns of atan2(M_y, M_x) on the loop
};

SphericalDecomposition spherical_decompose(const PoincareField& pf,
                                           double loop_radius,
                                           double center_x = 0.0,
                                           double center_y = 0.0);

/// Translate an image by (sx, sy) pixels with bilinear resampling;
/// samples falling outside the source read as zero.
Image shift_image(const Image& img, double sx, double sy);

} // namespace skyrm

#endif
