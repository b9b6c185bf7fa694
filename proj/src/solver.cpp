#include "gratres/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gratres {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = cdouble(re, im);
        }
    return m;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

nlohmann::json to_json(cdouble z) { return {z.real(), z.imag()}; }

} // namespace

bool Region::contains(cdouble z) const {
    if (kind == Kind::Disk) return std::abs(z - center) <= radius;
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
           z.imag() <= im_max;
}

double Region::scale() const {
    if (kind == Kind::Disk) return radius;
    return 0.5 * std::hypot(re_max - re_min, im_max - im_min);
}

void AuditLog::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open audit log for writing: " + path);
    for (const nlohmann::json& e : events) out << e.dump() << "\n";
}

double indicator(const NepOperator& op, const Disk& disk, const Eigen::VectorXcd& probe) {
    if (probe.norm() == 0.0) throw Error("indicator probe must be nonzero");
    const Eigen::VectorXcd p = probe.normalized();
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(op.dimension());
    for (int j = 1; j <= disk.n_quad; ++j) {
        const double theta = 2.0 * kPi * j / disk.n_quad;
        const cdouble node = disk.center + disk.radius * std::polar(1.0, theta);
        op.check_holomorphic(node);
        acc += std::polar(1.0, theta) * op.factorize(node)->solve(p);
    }
    return (disk.radius / disk.n_quad) * acc.norm();
}

BeynOutput beyn_extract(const NepOperator& op, const Disk& disk, int probe_width,
                        double svd_tol, std::uint64_t rng_seed) {
    const Eigen::Index n = op.dimension();
    const Eigen::Index width = std::min<Eigen::Index>(probe_width, n);
    const Eigen::MatrixXcd Vt = random_gaussian(n, width, rng_seed);

    Eigen::MatrixXcd C0 = Eigen::MatrixXcd::Zero(n, width);
    Eigen::MatrixXcd C1 = Eigen::MatrixXcd::Zero(n, width);
    for (int j = 1; j <= disk.n_quad; ++j) {
        const double theta = 2.0 * kPi * j / disk.n_quad;
        const cdouble node = disk.center + disk.radius * std::polar(1.0, theta);
        op.check_holomorphic(node);
        const Eigen::MatrixXcd Y = op.factorize(node)->solve(Vt);
        const cdouble w = (disk.radius / disk.n_quad) * std::polar(1.0, theta);
        C0 += w * Y;
        C1 += (w * node) * Y;
    }

    BeynOutput out;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(C0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues();
    const double sigma_max = out.singular_values.size() ? out.singular_values[0] : 0.0;
    if (sigma_max == 0.0) return out;

    Eigen::Index rank = 0;
    while (rank < out.singular_values.size() &&
           out.singular_values[rank] > svd_tol * sigma_max)
        ++rank;
    if (rank == 0) return out;
    if (rank == width && width < n) {
        // No rank drop observed: the probe subspace may be too narrow.
        out.subspace_too_small = true;
        return out;
    }

    const Eigen::MatrixXcd V0 = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXcd W0 = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd s0 = out.singular_values.head(rank);
    const Eigen::MatrixXcd D =
        V0.adjoint() * C1 * W0 * s0.cwiseInverse().asDiagonal().toDenseMatrix().cast<cdouble>();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(D);
    if (es.info() != Eigen::Success) throw Error("eigen decomposition of D failed");
    out.candidates.assign(es.eigenvalues().data(), es.eigenvalues().data() + rank);
    out.vectors = V0 * es.eigenvectors();
    return out;
}

Validation validate(const NepOperator& op, cdouble k, int max_iterations,
                    std::uint64_t rng_seed) {
    const Eigen::Index n = op.dimension();
    Eigen::VectorXcd x = random_gaussian(n, 1, rng_seed).col(0).normalized();

    std::unique_ptr<Factorization> fact;
    try {
        fact = op.factorize(k);
    } catch (const SingularAt&) {
        // Factorization pivot collapse: k is an eigenvalue to working precision.
        return {cdouble(0.0, 0.0), x, false};
    }

    cdouble mu_prev(0.0, 0.0);
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXcd y = fact->solve(x);
        const cdouble mu = x.dot(y); // x^H G^{-1} x, Rayleigh estimate of 1/lambda0
        const double ynorm = y.norm();
        if (!std::isfinite(ynorm) || ynorm == 0.0) {
            return {cdouble(0.0, 0.0), x, false};
        }
        x = y / ynorm;
        if (it > 0 && std::abs(mu - mu_prev) <= 1e-8 * std::abs(mu)) {
            mu_prev = mu;
            converged = true;
            break;
        }
        mu_prev = mu;
    }
    if (converged) return {1.0 / mu_prev, x, false};

    // Fallback metric: smallest singular value by power iteration on (G^H G)^{-1}.
    cdouble mu(0.0, 0.0);
    for (int it = 0; it < 50; ++it) {
        const Eigen::VectorXcd y = fact->solve(fact->solve_adjoint(x));
        mu = x.dot(y);
        const double ynorm = y.norm();
        if (!std::isfinite(ynorm) || ynorm == 0.0) return {cdouble(0.0, 0.0), x, false};
        x = y / ynorm;
    }
    return {cdouble(1.0 / std::sqrt(std::abs(mu)), 0.0), x, true};
}

std::vector<Disk> cover_region(const Region& region, int n_quad) {
    if (region.kind == Region::Kind::Disk)
        return {Disk{region.center, region.radius, n_quad}};

    const double w = region.re_max - region.re_min;
    const double h = region.im_max - region.im_min;
    if (!(w > 0.0) || !(h > 0.0)) throw Error("rectangle region must have positive extent");
    const int count = std::max(1, region.cover_count);
    // Hexagonal lattice: spacing s within rows, rows s*sqrt(3)/2 apart; the
    // disk radius is the hex-cell circumradius s/sqrt(3) plus 15% overlap.
    const double s = std::sqrt(2.0 * w * h / (std::sqrt(3.0) * count));
    const double row_step = s * std::sqrt(3.0) / 2.0;
    const double radius = 1.15 * s / std::sqrt(3.0);

    std::vector<Disk> cover;
    const int rows = std::max(1, static_cast<int>(std::ceil(h / row_step)));
    for (int j = 0; j < rows; ++j) {
        const double y = region.im_min + row_step * (j + 0.5);
        const double x0 = region.re_min + ((j % 2 == 0) ? 0.5 : 0.0) * s;
        for (double x = x0 - s; x <= region.re_max + s / 2.0; x += s) {
            if (x < region.re_min - s / 2.0) continue;
            cover.push_back(Disk{cdouble(x, y), radius, n_quad});
        }
    }
    return cover;
}

namespace {

struct RegionSolver {
    const NepOperator& op;
    const Region& region;
    const SolverConfig& cfg;
    AuditLog* audit;
    std::vector<EigenResult> accepted;
    std::uint64_t call_counter = 0;

    void log(nlohmann::json e) {
        if (audit) audit->record(std::move(e));
    }

    void check_disk_clear(const Disk& disk) const {
        for (const cdouble& s : op.singularities()) {
            if (std::abs(s - disk.center) <= disk.radius * (1.0 + 1e-12) + 1e-12) {
                std::ostringstream os;
                os << "search disk centered at (" << disk.center.real() << ", "
                   << disk.center.imag() << ") radius " << disk.radius
                   << " touches operator singularity (" << s.real() << ", " << s.imag() << ")";
                throw RegionTouchesSingularity(s, os.str());
            }
        }
    }

    double validation_metric(cdouble lambda0, cdouble k) const {
        double m = std::abs(lambda0);
        if (cfg.relative_validation) m /= op.one_norm(k);
        return m;
    }

    void process_disk(Disk disk, int disk_id, int depth) {
        disk.n_quad = cfg.n_quad;
        try {
            check_disk_clear(disk);
        } catch (const RegionTouchesSingularity& e) {
            if (depth == 0) throw;
            log({{"event", "refine_disk_skipped"},
                 {"disk", disk_id},
                 {"reason", "touches_singularity"},
                 {"singularity", to_json(e.offending)}});
            return;
        }

        BeynOutput out;
        int width = cfg.probe_width;
        const int width_cap =
            static_cast<int>(std::min<Eigen::Index>(cfg.max_probe_width, op.dimension()));
        for (;;) {
            out = beyn_extract(op, disk, width, cfg.svd_tol,
                               mix_seed(cfg.rng_seed, ++call_counter));
            if (!out.subspace_too_small || width >= width_cap) break;
            log({{"event", "probe_width_doubled"}, {"disk", disk_id}, {"from", width}});
            width = std::min(2 * width, width_cap);
        }
        {
            nlohmann::json sv = nlohmann::json::array();
            for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
                sv.push_back(out.singular_values[i]);
            log({{"event", "svd_spectrum"},
                 {"disk", disk_id},
                 {"depth", depth},
                 {"center", to_json(disk.center)},
                 {"radius", disk.radius},
                 {"sigma", std::move(sv)},
                 {"candidates", out.candidates.size()}});
        }

        std::vector<cdouble> refine_targets;
        auto schedule_refine = [&](cdouble k) {
            const double min_sep = 0.5 * disk.radius * cfg.refine_radius_factor;
            for (const cdouble& t : refine_targets)
                if (std::abs(t - k) < min_sep) return;
            refine_targets.push_back(k);
        };

        for (std::size_t i = 0; i < out.candidates.size(); ++i) {
            const cdouble k = out.candidates[i];
            const bool inside = disk.contains(k);
            log({{"event", "candidate"},
                 {"disk", disk_id},
                 {"depth", depth},
                 {"k", to_json(k)},
                 {"inside_disk", inside}});
            if (!inside) {
                // Never accept silently; re-route to a fresh disk when possible.
                if (region.contains(k) && depth < cfg.max_recursion_depth)
                    schedule_refine(k);
                else
                    log({{"event", "candidate_dropped"},
                         {"disk", disk_id},
                         {"k", to_json(k)},
                         {"reason", "outside_disk"}});
                continue;
            }

            Validation val;
            try {
                val = validate(op, k, cfg.max_inverse_iterations,
                               mix_seed(cfg.rng_seed, ++call_counter));
            } catch (const NotHolomorphicAt&) {
                log({{"event", "candidate_dropped"},
                     {"disk", disk_id},
                     {"k", to_json(k)},
                     {"reason", "not_holomorphic"}});
                continue;
            }
            const double metric = validation_metric(val.lambda0, k);
            nlohmann::json record = {{"event", "validation"},
                                     {"disk", disk_id},
                                     {"depth", depth},
                                     {"k", to_json(k)},
                                     {"lambda0", to_json(val.lambda0)},
                                     {"metric", metric},
                                     {"stalled", val.stalled}};
            if (!val.stalled && metric < cfg.accept_tol) {
                record["decision"] = "accept";
                accepted.push_back(
                    EigenResult{k, metric, std::move(val.eigenvector), disk_id, disk});
            } else if (!val.stalled && metric <= cfg.reject_tol &&
                       depth < cfg.max_recursion_depth) {
                record["decision"] = "refine";
                schedule_refine(k);
            } else if (!val.stalled && metric <= cfg.reject_tol) {
                record["decision"] = "discard_at_max_depth";
            } else {
                record["decision"] = "discard";
            }
            log(std::move(record));
        }

        for (const cdouble& target : refine_targets)
            process_disk(Disk{target, disk.radius * cfg.refine_radius_factor, cfg.n_quad},
                         disk_id, depth + 1);
    }
};

} // namespace

std::vector<EigenResult> solve_region(const NepOperator& op, const Region& region,
                                      const SolverConfig& config, AuditLog* audit) {
    RegionSolver solver{op, region, config, audit, {}, 0};

    std::vector<Disk> cover = cover_region(region, config.n_quad_indicator);
    for (const Disk& d : cover) solver.check_disk_clear(d);

    const Eigen::VectorXcd probe =
        random_gaussian(op.dimension(), 1, config.rng_seed).col(0);
    std::vector<double> values(cover.size());
    for (std::size_t i = 0; i < cover.size(); ++i) values[i] = indicator(op, cover[i], probe);
    const double v_max = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const double normalized = (v_max > 0.0) ? values[i] / v_max : 0.0;
        const bool keep = normalized >= config.indicator_threshold;
        if (audit)
            audit->record({{"event", "indicator"},
                           {"disk", static_cast<int>(i)},
                           {"center", to_json(cover[i].center)},
                           {"radius", cover[i].radius},
                           {"value", values[i]},
                           {"normalized", normalized},
                           {"kept", keep}});
        if (keep) kept.push_back(i);
    }

    for (std::size_t i : kept)
        solver.process_disk(cover[i], static_cast<int>(i), 0);

    // Refinement disks may stray past the region boundary; only report
    // eigenvalues inside the requested region.
    std::vector<EigenResult>& results = solver.accepted;
    std::erase_if(results, [&](const EigenResult& r) {
        if (region.contains(r.k)) return false;
        if (audit)
            audit->record({{"event", "result_dropped"},
                           {"k", to_json(r.k)},
                           {"reason", "outside_region"}});
        return true;
    });

    // Deduplicate near-coincident eigenvalues, preferring the smaller residual.
    std::sort(results.begin(), results.end(), [](const EigenResult& a, const EigenResult& b) {
        if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
        return a.k.imag() < b.k.imag();
    });
    const double dedup_tol = 1e-8 * region.scale();
    std::vector<EigenResult> unique;
    for (EigenResult& r : results) {
        bool merged = false;
        for (EigenResult& u : unique) {
            if (std::abs(u.k - r.k) < dedup_tol) {
                if (r.residual < u.residual) u = std::move(r);
                merged = true;
                break;
            }
        }
        if (!merged) unique.push_back(std::move(r));
    }
    if (audit)
        for (const EigenResult& r : unique)
            audit->record({{"event", "accepted"},
                           {"k", to_json(r.k)},
                           {"residual", r.residual},
                           {"disk", r.disk_id}});
    return unique;
}

} // namespace gratres
