#ifndef SKYRM_LG_HPP
#define SKYRM_LG_HPP

#include "skyrm/grid.hpp"

namespace skyrm {

/// Parameters of one Laguerre-Gaussian mode with radial index p = 0.
/// All lengths share the unit of w0 (the waist itself is the natural unit).
struct LGModeSpec {
    int l = 0;          ///< signed azimuthal index
    int p = 0;          ///< radial index, must stay 0
    double w0 = 1.0;    ///< waist
    double wavelength = 0.1;
    double z = 0.0;     ///< propagation distance

    double rayleigh_range() const;
    double beam_radius() const;    ///< w(z)
    double gouy_phase() const;     ///< arctan(z / zR)
    /// 1/R(z); zero at the waist where the wavefront is flat.
    double inverse_curvature() const;

    void validate() const;
};

/// Sample the analytically normalized p=0 LG mode on the grid.
///
/// amp(r,phi) = sqrt(2/(pi |l|!)) / w(z)
///              * (r sqrt(2)/w(z))^|l| * exp(-r^2/w(z)^2)
///              * exp(i l phi) * exp(i k r^2 / (2 R(z)))
///              * exp(-i (|l|+1) zeta(z))
/// with phi = atan2(y, x). The continuous norm of |amp|^2 is 1.
ScalarField lg_mode(const LGModeSpec& spec, const GridSpec& grid);

namespace serial {
/// Single-threaded reference for lg_mode; bit-identical output.
ScalarField lg_mode(const LGModeSpec& spec, const GridSpec& grid);
}

} // namespace skyrm

#endif
