#include "gratres/dtn.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "gratres/errors.hpp"

namespace gratres {

namespace {

constexpr double kPi = std::numbers::pi;

// g0(z) = int_0^1 exp(-z s) ds, g1(z) = int_0^1 s exp(-z s) ds, with series
// fallback near z = 0 to avoid cancellation.
void segment_moments(cdouble z, cdouble& g0, cdouble& g1) {
    if (std::abs(z) < 1e-4) {
        // g0 = sum (-z)^m / (m+1)!, g1 = sum (-z)^m (m+1) / (m+2)!
        cdouble term(1.0, 0.0);
        g0 = 0.0;
        g1 = 0.0;
        for (int m = 0; m < 12; ++m) {
            g0 += term / double(m + 1);
            g1 += term / double(m + 2);
            term *= -z / double(m + 1);
        }
        return;
    }
    const cdouble ez = std::exp(-z);
    g0 = (1.0 - ez) / z;
    g1 = (1.0 - (1.0 + z) * ez) / (z * z);
}

} // namespace

cdouble branch_sqrt(cdouble z) {
    // Distance to the excluded ray {-it : t >= 0}.
    const double dist = (z.imag() <= 0.0) ? std::abs(z.real()) : std::abs(z);
    if (dist < 1e-14 * std::max(1.0, std::abs(z))) {
        std::ostringstream os;
        os << "argument (" << z.real() << ", " << z.imag() << ") lies on the sqrt branch cut";
        throw BranchCutHit(z, os.str());
    }
    double a = std::arg(z); // (-pi, pi]
    if (a < -kPi / 2.0) a += 2.0 * kPi;
    return std::sqrt(std::abs(z)) * std::polar(1.0, a / 2.0);
}

cdouble zeta_n(cdouble k, double kappa, int n, double d) {
    const double kn = kappa + 2.0 * kPi * n / d;
    return branch_sqrt(k * k - kn * kn);
}

Eigen::VectorXcd boundary_fourier_vector(const Mesh& mesh, Side side, int n, double kappa,
                                         double d) {
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(mesh.node_count());
    const double kn = kappa + 2.0 * kPi * n / d;
    for (const BoundarySegment& seg : boundary_segments(mesh, side)) {
        const double a = mesh.nodes(seg.a, 0);
        const double b = mesh.nodes(seg.b, 0);
        const double h = b - a;
        const cdouble z = cdouble(0.0, kn * h);
        cdouble g0, g1;
        segment_moments(z, g0, g1);
        const cdouble phase = h * std::exp(cdouble(0.0, -kn * a));
        f[seg.a] += phase * (g0 - g1) / d; // hat peaking at the left endpoint
        f[seg.b] += phase * g1 / d;        // hat peaking at the right endpoint
    }
    return f;
}

DtnCache::DtnCache(const Mesh& mesh, const DtnSpec& spec) : spec_(spec) {
    if (spec.truncation_order < 0)
        throw ConfigError("dtn.order", "DtN truncation order must be non-negative");
    if (std::abs(spec.kappa) > kPi / spec.d * (1.0 + 1e-12))
        throw ConfigError("bloch.kappa", "Bloch wavenumber outside the Brillouin zone");
    dofs_ = (spec.side == Side::Top) ? mesh.top : mesh.bottom;
    if (dofs_.empty()) throw InvalidTopology("mesh has an empty top/bottom boundary set");

    std::unordered_map<int, int> compact;
    for (std::size_t i = 0; i < dofs_.size(); ++i) compact[dofs_[i]] = static_cast<int>(i);

    const int modes = 2 * spec.truncation_order + 1;
    coeff_.setZero(static_cast<int>(dofs_.size()), modes);
    for (int n = -spec.truncation_order; n <= spec.truncation_order; ++n) {
        const Eigen::VectorXcd f =
            boundary_fourier_vector(mesh, spec.side, n, spec.kappa, spec.d);
        for (std::size_t i = 0; i < dofs_.size(); ++i)
            coeff_(static_cast<int>(i), n + spec.truncation_order) =
                f[dofs_[i]] * spec.d; // store the raw integral a_n = d * f_n
    }
}

Eigen::VectorXcd DtnCache::mode_factors(cdouble k) const {
    const int Dt = spec_.truncation_order;
    Eigen::VectorXcd factors(2 * Dt + 1);
    for (int n = -Dt; n <= Dt; ++n)
        factors[n + Dt] = cdouble(0.0, 1.0) * zeta_n(k, spec_.kappa, n, spec_.d);
    return factors;
}

Eigen::MatrixXcd DtnCache::block(cdouble k) const {
    const Eigen::VectorXcd factors = mode_factors(k) / spec_.d;
    return coeff_.conjugate() * factors.asDiagonal() * coeff_.transpose();
}

std::vector<cdouble> DtnCache::anomalies() const {
    std::vector<cdouble> out;
    for (int n = -spec_.truncation_order; n <= spec_.truncation_order; ++n) {
        const double kn = spec_.kappa + 2.0 * kPi * n / spec_.d;
        out.emplace_back(kn, 0.0);
        out.emplace_back(-kn, 0.0);
    }
    return out;
}

} // namespace gratres
