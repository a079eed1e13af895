#ifndef SKYRM_EXPERIMENT_HPP
#define SKYRM_EXPERIMENT_HPP

#include "skyrm/polarimetry.hpp"
#include "skyrm/topology.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyrm {

/// Per-image registration offsets found during center calibration,
/// relative to the reference image (whose offset is exactly zero).
struct CalibrationReport {
    std::array<std::array<double, 2>, 6> offsets_px{};
    Proj reference = Proj::Z2;
    double residual_px = 0.0;
    std::string method = "intensity-centroid";
};

/// Per-pixel standard-deviation estimates for the three Poincare components.
struct UncertaintyMap {
    GridSpec grid;
    Image sigma_mx, sigma_my, sigma_mz;
    Mask mask;
};

/// Error thrown by the analysis pipeline, tagged with the failing stage.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Intensity centroid over pixels above 10% of the image peak, in pixel
/// coordinates. Throws on an all-dark image.
std::array<double, 2> intensity_centroid(const Image& img);

/// Translate every image so its centroid coincides with the reference
/// image's centroid (default I_z2, which stays a plain Gaussian whenever
/// the lower index is 0 and is therefore the most stable anchor).
std::pair<MeasurementSet, CalibrationReport>
calibrate_centers(const MeasurementSet& ms, Proj reference = Proj::Z2);

/// Local noise estimate: windowed standard deviation of each intensity
/// image after subtracting a least-squares plane fit, propagated through
/// the reconstruction ratio to each M component.
UncertaintyMap estimate_uncertainty(const MeasurementSet& ms, int window = 5);

struct PipelineOptions {
    double floor_rel = 1e-3; ///< mask floor on the z-pair denominator
    double eta = 1e-3;       ///< intensity cutoff for the auto radius
    int window = 5;          ///< uncertainty sampling window
    std::vector<double> radii; ///< sweep radii; auto-generated when empty
    double fixed_radius = 0.0; ///< > 0 overrides the auto radius
    bool calibrate = true;
    bool with_uncertainty_map = true;
};

struct AnalysisOutput {
    AnalysisResult result;
    PoincareField poincare;
    SkyrmionDensityField density;
    std::vector<AnalysisResult> sweep;
    CalibrationReport calibration;
    UncertaintyMap uncertainty;
    std::array<double, 2> center{0.0, 0.0};
};

/// Full pipeline: calibrate -> reconstruct -> density -> auto radius ->
/// skyrmion number, with truncation + propagated uncertainty combined in
/// quadrature. Stage failures surface as PipelineError.
AnalysisOutput analyze(const MeasurementSet& ms, const PipelineOptions& opts = {});

} // namespace skyrm

#endif
