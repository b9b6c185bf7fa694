#pragma once

#include <complex>

#include "gratres/errors.hpp"

namespace gratres {

using cdouble = std::complex<double>;

/// Inputs of the small-slit asymptotic eigenvalue formula for the perfectly
/// conducting rectangular-slit grating with slab thickness 1.
struct AsymptoticParams {
    int m = 1;          ///< mode index >= 1
    double kappa = 0.0; ///< Bloch wavenumber
    double delta = 0.0; ///< slit width, 0 < delta << 1
    double d = 1.0;     ///< period
    double series_tol = 1e-12;
};

/// gamma(k, kappa, d) = (1/pi)(3 ln 2 + ln(pi/d)) - i/(d zeta_0(k))
///                      + sum_{n != 0} (1/(2 pi |n|) - i/(d zeta_n(k))),
/// with the +-n terms paired before summing and the O(1/n^2) tail
/// Richardson-extrapolated once two successive partial-sum changes fall
/// below series_tol. Throws SeriesDiverged after 1e7 terms.
cdouble gamma_constant(double k, double kappa, double d, double series_tol = 1e-12);

/// k_m = m pi + 2 m pi [ (1/pi) delta ln delta + (1/alpha + gamma(m pi, kappa, d)) delta ]
/// with alpha = -1.1070218960566; the O(delta^2 ln^2 delta) remainder is dropped.
cdouble asymptotic_eigenvalue(const AsymptoticParams& params);

} // namespace gratres
