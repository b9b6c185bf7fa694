#include "gratres/materials.hpp"

#include <cmath>
#include <sstream>

namespace gratres {

PermittivityModel PermittivityModel::drude_lossless(double omega_p_hat) {
    if (!(omega_p_hat > 0.0))
        throw ConfigError("omega_p_hat", "DrudeLossless requires omega_p_hat > 0");
    return {Kind::DrudeLossless, omega_p_hat, 0.0};
}

PermittivityModel PermittivityModel::drude_sommerfeld(double omega_p_hat, double gamma_hat) {
    if (!(omega_p_hat > 0.0))
        throw ConfigError("omega_p_hat", "DrudeSommerfeld requires omega_p_hat > 0");
    if (gamma_hat < 0.0)
        throw ConfigError("gamma_hat", "DrudeSommerfeld requires gamma_hat >= 0");
    return {Kind::DrudeSommerfeld, omega_p_hat, gamma_hat};
}

std::vector<cdouble> PermittivityModel::poles() const {
    switch (kind_) {
    case Kind::DrudeLossless:
        return {cdouble(0.0, 0.0)};
    case Kind::DrudeSommerfeld:
        // eps = 1 - wp^2/(k^2 + i g k); denominator zeros at k = 0 and k = -i g.
        return {cdouble(0.0, 0.0), cdouble(0.0, -gamma_hat_)};
    default:
        return {};
    }
}

std::vector<cdouble> PermittivityModel::zeros() const {
    switch (kind_) {
    case Kind::DrudeLossless:
        return {cdouble(omega_p_hat_, 0.0), cdouble(-omega_p_hat_, 0.0)};
    case Kind::DrudeSommerfeld: {
        // Roots of k^2 + i g k - wp^2 = 0.
        const cdouble ig(0.0, gamma_hat_);
        const cdouble disc = std::sqrt(cdouble(4.0 * omega_p_hat_ * omega_p_hat_ -
                                               gamma_hat_ * gamma_hat_, 0.0));
        return {(-ig + disc) / 2.0, (-ig - disc) / 2.0};
    }
    default:
        return {};
    }
}

cdouble evaluate_permittivity(const PermittivityModel& model, cdouble k) {
    switch (model.kind()) {
    case PermittivityModel::Kind::Vacuum:
        return cdouble(1.0, 0.0);
    case PermittivityModel::Kind::PEC:
        throw std::logic_error("PEC permittivity never evaluates; it removes the metal domain");
    default:
        break;
    }
    for (const cdouble& p : model.poles()) {
        if (std::abs(k - p) < model.exclusion_radius) {
            std::ostringstream os;
            os << "permittivity evaluated within exclusion radius of pole (" << p.real()
               << ", " << p.imag() << ")";
            throw EvaluationAtSingularity(k, os.str());
        }
    }
    const double wp2 = model.omega_p_hat() * model.omega_p_hat();
    if (model.kind() == PermittivityModel::Kind::DrudeLossless)
        return 1.0 - wp2 / (k * k);
    const cdouble ig(0.0, model.gamma_hat());
    return 1.0 - wp2 / (k * (k + ig));
}

std::pair<double, double> scale_drude(double omega_p, double gamma, const Scaling& s) {
    if (!(omega_p > 0.0))
        throw ConfigError("omega_p", "omega_p must be positive");
    if (gamma < 0.0)
        throw ConfigError("gamma", "gamma must be non-negative");
    if (!(s.alpha > 0.0) || !(s.c > 0.0))
        throw ConfigError("scaling", "alpha and c must be positive");
    const double f = s.c * s.alpha;
    return {omega_p / f, gamma / f};
}

} // namespace gratres
