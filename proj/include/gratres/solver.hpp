#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gratres/nep_operator.hpp"

namespace gratres {

/// Circular search region with trapezoid quadrature order.
struct Disk {
    cdouble center;
    double radius = 0.0;
    int n_quad = 32;

    bool contains(cdouble z) const { return std::abs(z - center) <= radius; }
};

/// Rectangle or disk search region for solve_region.
struct Region {
    enum class Kind { Disk, Rectangle };
    Kind kind = Kind::Disk;
    cdouble center;       // disk
    double radius = 0.0;  // disk
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0; // rectangle
    int cover_count = 80; // approximate number of covering disks (rectangle)

    static Region disk(cdouble center, double radius) {
        Region r;
        r.kind = Kind::Disk;
        r.center = center;
        r.radius = radius;
        return r;
    }
    static Region rectangle(double re_min, double re_max, double im_min, double im_max,
                            int cover_count = 80) {
        Region r;
        r.kind = Kind::Rectangle;
        r.re_min = re_min;
        r.re_max = re_max;
        r.im_min = im_min;
        r.im_max = im_max;
        r.cover_count = cover_count;
        return r;
    }

    bool contains(cdouble z) const;
    double scale() const; ///< characteristic length (radius or half-diagonal)
};

struct SolverConfig {
    double indicator_threshold = 0.2;
    double svd_tol = 1e-6;       ///< singular-value cutoff relative to sigma_max;
                                 ///< must sit above the trapezoid-leakage noise
                                 ///< floor of eigenvalues just outside the contour
    int probe_width = 24;        ///< L1, doubled on SubspaceTooSmall
    int max_probe_width = 192;
    double accept_tol = 1e-12;   ///< |lambda0| below which a candidate is accepted
    double reject_tol = 1e-5;    ///< |lambda0| above which a candidate is discarded
    double refine_radius_factor = 0.1;
    std::uint64_t rng_seed = 7122022;
    int max_recursion_depth = 3;
    int n_quad = 64;             ///< quadrature nodes for Beyn extraction
    int n_quad_indicator = 16;   ///< quadrature nodes for the indicator scan
    int max_inverse_iterations = 200;
    bool relative_validation = false; ///< compare |lambda0| / ||G(k)||_1 instead
};

/// Verified eigenvalue with provenance.
struct EigenResult {
    cdouble k;
    double residual = 0.0; ///< validation metric |lambda0|
    Eigen::VectorXcd eigenvector;
    int disk_id = -1;
    Disk disk;
};

/// Append-only structured log; one JSON object per event.
struct AuditLog {
    std::vector<nlohmann::json> events;

    void record(nlohmann::json e) { events.push_back(std::move(e)); }
    void write(const std::string& path) const;
};

/// Spectral indicator: || (1/2 pi i) contour integral of G(z)^{-1} probe dz ||_2
/// by the N_t-node trapezoid rule, with the probe normalized to unit 2-norm.
/// Near zero iff the disk encloses no eigenvalue.
double indicator(const NepOperator& op, const Disk& disk, const Eigen::VectorXcd& probe);

/// Output of one subspace-projection extraction.
struct BeynOutput {
    bool subspace_too_small = false;
    std::vector<cdouble> candidates;
    Eigen::MatrixXcd vectors;          ///< one column per candidate
    Eigen::VectorXd singular_values;   ///< full sigma spectrum of C0
};

/// Contour-moment extraction: C0, C1 by trapezoid quadrature, thin SVD of
/// C0, eigenvalues of D = V0^H C1 W0 Sigma0^{-1}. Candidates outside the
/// disk are returned as well (the caller filters).
BeynOutput beyn_extract(const NepOperator& op, const Disk& disk, int probe_width,
                        double svd_tol, std::uint64_t rng_seed);

struct Validation {
    cdouble lambda0;            ///< smallest-magnitude eigenvalue of G(k)
    Eigen::VectorXcd eigenvector;
    bool stalled = false;       ///< inverse iteration did not converge;
                                ///< lambda0 then holds the smallest singular value
};

/// Inverse iteration (shift 0) on a factorization of G(k).
Validation validate(const NepOperator& op, cdouble k, int max_iterations = 200,
                    std::uint64_t rng_seed = 1);

/// Hexagonal-lattice disk cover of a rectangle with ~15% overlap.
std::vector<Disk> cover_region(const Region& region, int n_quad);

/// Multi-step eigensolver: indicator scan over a disk cover, subspace
/// extraction on kept disks, validation with recursive refinement.
std::vector<EigenResult> solve_region(const NepOperator& op, const Region& region,
                                      const SolverConfig& config, AuditLog* audit = nullptr);

} // namespace gratres
