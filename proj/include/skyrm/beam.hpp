#ifndef SKYRM_BEAM_HPP
#define SKYRM_BEAM_HPP

#include "skyrm/grid.hpp"
#include "skyrm/lg.hpp"

#include <string>

namespace skyrm {

/// Which laboratory polarization carries the first (lower-order) component.
enum class BeamBasis {
    AOnH, ///< component A on |H>, component B on |V>
    AOnV, ///< component A on |V>, component B on |H>
};

std::string to_string(BeamBasis b);
BeamBasis beam_basis_from_string(const std::string& s);

/// Two-component vector beam: compA carries l1, compB carries l2 with the
/// extra superposition phase theta0. The per-pixel normalized state is
///   (a, b) = (u0, e^{i theta0} u1) / sqrt(|u0|^2 + |u1|^2)
/// wherever the denominator is positive.
struct VectorBeam {
    ScalarField compA;
    ScalarField compB;
    double theta0 = 0.0;
    BeamBasis basis = BeamBasis::AOnH;
    int l1 = 0;
    int l2 = 0;

    const GridSpec& grid() const { return compA.grid; }
};

/// Shared optical parameters of the two modes (they differ only in l).
struct BeamOptics {
    double w0 = 1.0;
    double wavelength = 0.1;
    double z = 0.0;
};

VectorBeam build_beam(int l1, int l2, double theta0, const GridSpec& grid,
                      const BeamOptics& optics = {},
                      BeamBasis basis = BeamBasis::AOnH);

/// Default square grid for a beam pair: extent 4 * max(w0, w(z) * sqrt(l2/2 + 1)).
GridSpec default_grid(int n, int l2, const BeamOptics& optics);

} // namespace skyrm

#endif
