#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "gratres/errors.hpp"

namespace gratres {

using cdouble = std::complex<double>;

/// Linear-solve handle for G(k) at a fixed k; supports multiple
/// right-hand sides and adjoint solves.
class Factorization {
public:
    virtual ~Factorization() = default;
    virtual Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const = 0;
    virtual Eigen::MatrixXcd solve_adjoint(const Eigen::MatrixXcd& rhs) const = 0;
};

/// A holomorphic matrix-valued function k -> G(k) exposed through
/// evaluate/factorize/solve contracts; the contour solver is generic
/// over this interface.
class NepOperator {
public:
    virtual ~NepOperator() = default;

    virtual Eigen::Index dimension() const = 0;

    /// Throws NotHolomorphicAt if k is vetoed (material pole/zero,
    /// Rayleigh anomaly, branch cut). Default: no veto.
    virtual void check_holomorphic(cdouble /*k*/) const {}

    /// Points where G fails to be holomorphic (used for region vetting).
    virtual std::vector<cdouble> singularities() const { return {}; }

    /// Throws SingularAt when the factorization detects numerical singularity.
    virtual std::unique_ptr<Factorization> factorize(cdouble k) const = 0;

    /// G(k) * x.
    virtual Eigen::MatrixXcd apply(cdouble k, const Eigen::MatrixXcd& x) const = 0;

    /// ||G(k)||_1, used by the relative validation mode.
    virtual double one_norm(cdouble k) const {
        return apply(k, Eigen::MatrixXcd::Identity(dimension(), dimension()))
            .cwiseAbs()
            .colwise()
            .sum()
            .maxCoeff();
    }
};

/// Dense operator defined by a callback; used for synthetic problems
/// with known spectra.
class DenseNepOperator final : public NepOperator {
public:
    using Builder = std::function<Eigen::MatrixXcd(cdouble)>;

    DenseNepOperator(Eigen::Index n, Builder builder)
        : n_(n), builder_(std::move(builder)) {}

    Eigen::Index dimension() const override { return n_; }
    std::unique_ptr<Factorization> factorize(cdouble k) const override;
    Eigen::MatrixXcd apply(cdouble k, const Eigen::MatrixXcd& x) const override {
        return builder_(k) * x;
    }

private:
    Eigen::Index n_;
    Builder builder_;
};

} // namespace gratres
