#include "gratres/pec_oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gratres/dtn.hpp"

namespace gratres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlpha = -1.1070218960566;

// Paired n-th term of the gamma series: +n and -n combined so the leading
// 1/(2 pi n) parts cancel against the zeta tails and the pair decays O(1/n^2).
cdouble paired_term(double k, double kappa, double d, long n) {
    const cdouble term_p =
        1.0 / (2.0 * kPi * n) - cdouble(0.0, 1.0) / (d * zeta_n(cdouble(k), kappa, static_cast<int>(n), d));
    const cdouble term_m =
        1.0 / (2.0 * kPi * n) - cdouble(0.0, 1.0) / (d * zeta_n(cdouble(k), kappa, static_cast<int>(-n), d));
    return term_p + term_m;
}

} // namespace

cdouble gamma_constant(double k, double kappa, double d, double series_tol) {
    if (!(d > 0.0)) throw Error("gamma: period d must be positive");
    const cdouble zeta0 = zeta_n(cdouble(k), kappa, 0, d);
    if (std::abs(zeta0) == 0.0)
        throw Error("gamma: k coincides with a Rayleigh anomaly (zeta_0 = 0)");

    cdouble sum = (3.0 * std::log(2.0) + std::log(kPi / d)) / kPi -
                  cdouble(0.0, 1.0) / (d * zeta0);

    // Sum paired terms; the pair sequence behaves like c/n^2 for large n, so
    // after convergence Richardson-extrapolate the geometric-like tail
    // S - S_N ~ c/N using the last term: tail ~ n * term_n.
    constexpr long kMaxTerms = 10'000'000;
    double prev_change = std::numeric_limits<double>::infinity();
    cdouble last_term(0.0, 0.0);
    long n = 0;
    bool converged = false;
    for (n = 1; n <= kMaxTerms; ++n) {
        last_term = paired_term(k, kappa, d, n);
        sum += last_term;
        const double change = std::abs(last_term);
        if (n > 2 && change < series_tol && prev_change < series_tol) {
            converged = true;
            break;
        }
        prev_change = change;
    }
    if (!converged) {
        std::ostringstream os;
        os << "gamma series did not reach tolerance " << series_tol << " within " << kMaxTerms
           << " terms";
        throw SeriesDiverged(os.str());
    }
    // Tail estimate for sum_{j>n} c/j^2 ~ c/n with c ~ n^2 * term_n.
    sum += static_cast<double>(n) * last_term;
    return sum;
}

cdouble asymptotic_eigenvalue(const AsymptoticParams& params) {
    if (params.m < 1) throw Error("asymptotic_eigenvalue: mode index m must be >= 1");
    if (!(params.delta > 0.0) || params.delta >= 1.0)
        throw Error("asymptotic_eigenvalue: slit width delta must lie in (0, 1)");
    const double m_pi = params.m * kPi;
    const cdouble g = gamma_constant(m_pi, params.kappa, params.d, params.series_tol);
    const double delta = params.delta;
    return m_pi +
           2.0 * m_pi *
               (delta * std::log(delta) / kPi + (1.0 / kAlpha + g) * delta);
}

} // namespace gratres
