#include "skyrm/beam.hpp"

#include <cmath>
#include <stdexcept>

namespace skyrm {

std::string to_string(BeamBasis b) {
    return b == BeamBasis::AOnH ? "AonH" : "AonV";
}

BeamBasis beam_basis_from_string(const std::string& s) {
    if (s == "AonH") return BeamBasis::AOnH;
    if (s == "AonV") return BeamBasis::AOnV;
    throw std::invalid_argument("unknown beam basis '" + s + "' (AonH or AonV)");
}

VectorBeam build_beam(int l1, int l2, double theta0, const GridSpec& grid,
                      const BeamOptics& optics, BeamBasis basis) {
    if (!std::isfinite(theta0))
        throw std::invalid_argument("build_beam: theta0 must be finite");
    LGModeSpec spec;
    spec.w0 = optics.w0;
    spec.wavelength = optics.wavelength;
    spec.z = optics.z;

    VectorBeam beam;
    spec.l = l1;
    beam.compA = lg_mode(spec, grid);
    spec.l = l2;
    beam.compB = lg_mode(spec, grid);
    beam.theta0 = theta0;
    beam.basis = basis;
    beam.l1 = l1;
    beam.l2 = l2;
    return beam;
}

GridSpec default_grid(int n, int l2, const BeamOptics& optics) {
    LGModeSpec spec;
    spec.l = l2;
    spec.w0 = optics.w0;
    spec.wavelength = optics.wavelength;
    spec.z = optics.z;
    // the outer texture ring of an |l2| mode sits at w(z) sqrt(|l2|/2); pad
    // by three beam radii so the field decays below any practical floor
    // while keeping the pixel pitch as fine as the grid size allows
    const double wz = spec.beam_radius();
    const double extent = wz * (std::sqrt(0.5 * std::abs(l2)) + 3.0);
    return GridSpec::centered(n, extent);
}

} // namespace skyrm
