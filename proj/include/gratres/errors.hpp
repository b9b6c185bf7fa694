#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gratres {

/// Base class for all numerical / validation errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A permittivity model was evaluated inside the exclusion radius of a pole.
class EvaluationAtSingularity : public Error {
public:
    std::complex<double> where;
    EvaluationAtSingularity(std::complex<double> k, const std::string& what)
        : Error(what), where(k) {}
};

/// k^2 - kappa_n^2 fell on (or within tolerance of) the branch cut of sqrt.
class BranchCutHit : public Error {
public:
    std::complex<double> where;
    BranchCutHit(std::complex<double> k, const std::string& what)
        : Error(what), where(k) {}
};

/// The operator is not holomorphic at the requested point.
class NotHolomorphicAt : public Error {
public:
    enum class Reason { material_pole, material_zero, rayleigh_anomaly, branch_cut };
    std::complex<double> where;
    Reason reason;
    NotHolomorphicAt(std::complex<double> k, Reason r, const std::string& what)
        : Error(what), where(k), reason(r) {}
};

/// Factorization detected numerical singularity at k.
class SingularAt : public Error {
public:
    std::complex<double> where;
    SingularAt(std::complex<double> k, const std::string& what)
        : Error(what), where(k) {}
};

/// Geometry is degenerate (e.g. slit width below resolvable size).
class GeometryDegenerate : public Error {
public:
    using Error::Error;
};

/// A triangle with (near) zero area was encountered during assembly.
class DegenerateTriangle : public Error {
public:
    using Error::Error;
};

/// Mesh file could not be parsed.
class ParseError : public Error {
public:
    long line = -1;
    ParseError(long line_no, const std::string& what) : Error(what), line(line_no) {}
};

/// An imported mesh violates the Mesh invariants.
class InvalidTopology : public Error {
public:
    using Error::Error;
};

/// Inverse iteration failed to converge.
class IterationStalled : public Error {
public:
    using Error::Error;
};

/// A search region touches a singularity of the operator.
class RegionTouchesSingularity : public Error {
public:
    std::complex<double> offending;
    RegionTouchesSingularity(std::complex<double> s, const std::string& what)
        : Error(what), offending(s) {}
};

/// The lattice-sum tail failed to meet its tolerance.
class SeriesDiverged : public Error {
public:
    using Error::Error;
};

/// Run configuration is invalid; `key` names the offending entry.
class ConfigError : public Error {
public:
    std::string key;
    ConfigError(const std::string& k, const std::string& what) : Error(what), key(k) {}
};

} // namespace gratres
