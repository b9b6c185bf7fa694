#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "gratres/mesh.hpp"

namespace gratres {

using cdouble = std::complex<double>;

/// Truncated DtN map specification for one horizontal boundary.
struct DtnSpec {
    double kappa = 0.0;        ///< Bloch wavenumber in [-pi/d, pi/d]
    double d = 1.0;            ///< period
    int truncation_order = 50; ///< D_t >= 0
    Side side = Side::Top;
};

/// Square root with the branch cut on the ray {-it : t >= 0}:
/// z^{1/2} = |z|^{1/2} exp(i arg(z)/2) with arg(z) in (-pi/2, 3pi/2).
/// Throws BranchCutHit within tolerance 1e-14 (relative) of the cut.
cdouble branch_sqrt(cdouble z);

/// Transverse wavenumber zeta_n(k) = sqrt(k^2 - kappa_n^2) with
/// kappa_n = kappa + 2 pi n / d, using branch_sqrt.
cdouble zeta_n(cdouble k, double kappa, int n, double d);

/// Fourier coefficient vector over all mesh DOFs: entry j is
/// (1/d) * integral of the piecewise-linear trace of phi_j against
/// exp(-i kappa_n x1) along the given boundary; zero elsewhere.
/// Boundary integrals are closed-form with a series fallback for
/// small |kappa_n| * (element length).
Eigen::VectorXcd boundary_fourier_vector(const Mesh& mesh, Side side, int n, double kappa,
                                         double d);

/// k-independent Fourier caches for one boundary; the k-dependent block is
/// rebuilt per evaluation by rescaling with fresh i*zeta_n(k).
class DtnCache {
public:
    DtnCache(const Mesh& mesh, const DtnSpec& spec);

    const DtnSpec& spec() const { return spec_; }

    /// Boundary DOF node indices (sorted by x1) the block acts on.
    const std::vector<int>& boundary_dofs() const { return dofs_; }

    /// Raw trace integrals a_n[j] = integral phi_j exp(-i kappa_n x1) dx1
    /// in compact boundary-DOF ordering, for n in [-D_t, D_t].
    const Eigen::MatrixXcd& coefficients() const { return coeff_; }

    /// i * zeta_n(k) for n in [-D_t, D_t]; throws BranchCutHit.
    Eigen::VectorXcd mode_factors(cdouble k) const;

    /// Densified boundary block at k, in compact boundary-DOF ordering:
    ///   block(q, j) = sum_n (i zeta_n(k) / d) conj(a_n[q]) a_n[j].
    Eigen::MatrixXcd block(cdouble k) const;

    /// Branch points +-kappa_n of the truncated map (Rayleigh anomalies).
    std::vector<cdouble> anomalies() const;

private:
    DtnSpec spec_;
    std::vector<int> dofs_;
    Eigen::MatrixXcd coeff_; // N_b x (2 D_t + 1), column n + D_t
};

} // namespace gratres
