#pragma once

#include <complex>
#include <vector>

#include "gratres/errors.hpp"

namespace gratres {

using cdouble = std::complex<double>;

/// Unit scaling between physical quantities and the computational
/// (scaled) wavenumber k_hat: omega = c * alpha * k_hat.
struct Scaling {
    double alpha = 1.0; ///< dimensionless geometric scale factor
    double c = 2.99792458e8; ///< wave speed [length/time]
};

/// Frequency-dependent relative permittivity of the metal.
///
/// All wavenumbers are in scaled units. The Drude-Sommerfeld form is
///   eps(k) = 1 - wp^2/(k^2 + g^2) + i g wp^2 / (k (k^2 + g^2)),
/// which reduces to the lossless Drude form 1 - wp^2/k^2 for g = 0.
class PermittivityModel {
public:
    enum class Kind { Vacuum, PEC, DrudeLossless, DrudeSommerfeld };

    static PermittivityModel vacuum() { return {Kind::Vacuum, 0.0, 0.0}; }
    static PermittivityModel pec() { return {Kind::PEC, 0.0, 0.0}; }
    static PermittivityModel drude_lossless(double omega_p_hat);
    static PermittivityModel drude_sommerfeld(double omega_p_hat, double gamma_hat);

    Kind kind() const { return kind_; }
    double omega_p_hat() const { return omega_p_hat_; }
    double gamma_hat() const { return gamma_hat_; }

    /// Poles of eps(k): points where the model itself blows up.
    std::vector<cdouble> poles() const;

    /// Zeros of eps(k): points where 1/eps in the stiffness term blows up.
    std::vector<cdouble> zeros() const;

    /// Exclusion radius around poles/zeros inside which evaluation refuses
    /// to run and the solver must not place quadrature nodes.
    double exclusion_radius = 1e-6;

private:
    PermittivityModel(Kind k, double wp, double g)
        : kind_(k), omega_p_hat_(wp), gamma_hat_(g) {}
    Kind kind_;
    double omega_p_hat_;
    double gamma_hat_;
};

/// Evaluate eps(k) at a scaled complex wavenumber.
/// Throws EvaluationAtSingularity within the exclusion radius of a pole,
/// and std::logic_error for the PEC model (which never evaluates).
cdouble evaluate_permittivity(const PermittivityModel& model, cdouble k);

/// Scale a physical (omega_p, gamma) pair [1/time] to computational units:
/// omega_p_hat = omega_p / (c * alpha), likewise for gamma.
std::pair<double, double> scale_drude(double omega_p, double gamma, const Scaling& s);

/// Physical angular frequency (same 1/time unit as c/alpha) from a scaled
/// wavenumber: omega = c * alpha * k_hat.
inline cdouble physical_frequency(cdouble k_hat, const Scaling& s) {
    return s.c * s.alpha * k_hat;
}

} // namespace gratres
