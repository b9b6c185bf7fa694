#include "gratres/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gratres/assembly.hpp"

namespace gratres {

namespace {

namespace fs = std::filesystem;

double point_segment_distance(double px, double py, double ax, double ay, double bx,
                              double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::hypot(dx, dy);
}

/// Distance to the metal surface (slab faces and slit walls).
double surface_distance(const GratingGeometry& g, double x, double y) {
    const double h = g.ell / 2.0;
    double best = std::numeric_limits<double>::infinity();
    auto seg = [&](double ax, double ay, double bx, double by) {
        best = std::min(best, point_segment_distance(x, y, ax, ay, bx, by));
    };
    if (g.has_slit()) {
        const double lt = g.slit_wall_left(h), rt = g.slit_wall_right(h);
        const double lb = g.slit_wall_left(-h), rb = g.slit_wall_right(-h);
        seg(0.0, h, lt, h);
        seg(rt, h, g.d, h);
        seg(0.0, -h, lb, -h);
        seg(rb, -h, g.d, -h);
        seg(lb, -h, lt, h);
        seg(rb, -h, rt, h);
    } else {
        seg(0.0, h, g.d, h);
        seg(0.0, -h, g.d, -h);
    }
    return best;
}

bool in_slit_bbox(const GratingGeometry& g, double x, double y) {
    if (!g.has_slit()) return false;
    const double h = g.ell / 2.0;
    const double w = std::max(g.slit.top_width, g.slit.base_width) / 2.0;
    return std::abs(y) <= h && std::abs(x - g.d / 2.0) <= w;
}

std::string csv_complex(cdouble z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g", z.real(), z.imag());
    return buf;
}

struct SingleSolve {
    std::vector<ResultRow> rows;
    std::vector<std::pair<int, Eigen::VectorXcd>> fields; ///< (row index, eigvec)
    std::vector<std::string> errors;
    bool any_ok = false;
};

SingleSolve solve_at_kappa(const RunConfig& config, const Mesh& mesh, double kappa,
                           AuditLog* audit) {
    SingleSolve out;
    AssembledBlocks blocks = assemble_blocks(mesh, kappa, config.dtn_order);
    FemNepOperator op(std::move(blocks), config.material);
    for (const RegionSpec& spec : config.regions) {
        try {
            std::vector<EigenResult> found =
                solve_region(op, spec.region, config.solver, audit);
            out.any_ok = true;
            for (EigenResult& r : found) {
                ResultRow row;
                row.kappa = kappa;
                row.k = r.k;
                row.residual = r.residual;
                row.disk_id = r.disk_id;
                row.region_name = spec.name;
                row.classification =
                    classify(mesh, config.geometry, r.eigenvector,
                             config.surface_shell_factor, config.classify_majority);
                out.fields.emplace_back(static_cast<int>(out.rows.size()),
                                        std::move(r.eigenvector));
                out.rows.push_back(std::move(row));
            }
        } catch (const Error& e) {
            std::ostringstream os;
            os << "kappa=" << kappa << " " << spec.name << ": " << e.what();
            out.errors.push_back(os.str());
            if (audit)
                audit->record({{"event", "region_failed"},
                               {"kappa", kappa},
                               {"region", spec.name},
                               {"error", e.what()}});
        }
    }
    std::vector<std::size_t> order(out.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.rows[a].k.real() < out.rows[b].k.real();
    });
    SingleSolve sorted;
    sorted.errors = std::move(out.errors);
    sorted.any_ok = out.any_ok;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        sorted.rows.push_back(std::move(out.rows[order[pos]]));
        sorted.fields.emplace_back(static_cast<int>(pos),
                                   std::move(out.fields[order[pos]].second));
    }
    return sorted;
}

void write_csv(const RunConfig& config, const std::vector<ResultRow>& rows,
               const std::string& filename, const std::string& config_hash,
               int mesh_level) {
    const fs::path path = fs::path(config.output_dir) / filename;
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path.string());
    out << "kappa,branch,re_k,im_k,residual,disk_id,region,classification,"
           "config_hash,mesh_level";
    if (config.report_thz) out << ",re_omega_thz,im_omega_thz";
    out << "\n";
    for (const ResultRow& r : rows) {
        char head[64];
        std::snprintf(head, sizeof(head), "%.12g", r.kappa);
        out << head << "," << r.branch << "," << csv_complex(r.k) << ",";
        char res[32];
        std::snprintf(res, sizeof(res), "%.3e", r.residual);
        out << res << "," << r.disk_id << "," << r.region_name << ","
            << to_string(r.classification) << "," << config_hash << "," << mesh_level;
        if (config.report_thz) {
            const cdouble w = physical_frequency(r.k, *config.scaling) / 1.0e12;
            out << "," << csv_complex(w);
        }
        out << "\n";
    }
}

RunStatus status_of(bool any_ok, bool any_error) {
    if (!any_error) return RunStatus::Ok;
    return any_ok ? RunStatus::Partial : RunStatus::NumericalFailure;
}

} // namespace

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Cavity: return "cavity";
        case Classification::SurfacePlasmon: return "surface-plasmon";
        default: return "unclassified";
    }
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Classification classify(const Mesh& mesh, const GratingGeometry& geometry,
                        const Eigen::VectorXcd& eigvec, double shell_factor,
                        double majority) {
    if (eigvec.size() < mesh.node_count())
        throw Error("classify: eigenvector shorter than the mesh node count");
    if (!geometry.has_slab()) return Classification::Unclassified;
    const double shell = shell_factor * geometry.d;

    // Lumped mass: one third of each adjacent triangle area per node.
    Eigen::VectorXd lump = Eigen::VectorXd::Zero(mesh.node_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double a3 = mesh.triangle_area(t) / 3.0;
        for (int v = 0; v < 3; ++v) lump(mesh.triangles(t, v)) += a3;
    }
    // Mass and area of the two feature regions. The surface shell counts the
    // vacuum side only: field inside the metal near a face is bulk
    // penetration, not a surface wave, and would swamp the shell otherwise.
    double total = 0.0, slit_mass = 0.0, surf_mass = 0.0;
    double cell_area = 0.0, slit_area = 0.0, surf_area = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
        const double m = lump(i) * std::norm(eigvec(i));
        total += m;
        cell_area += lump(i);
        const double x = mesh.nodes(i, 0), y = mesh.nodes(i, 1);
        if (in_slit_bbox(geometry, x, y)) {
            slit_mass += m;
            slit_area += lump(i);
        } else if (surface_distance(geometry, x, y) <= shell &&
                   !geometry.in_metal(x, y)) {
            surf_mass += m;
            surf_area += lump(i);
        }
    }
    if (total <= 0.0) return Classification::Unclassified;

    // A feature "holds" a mode only if its mass density there is well above
    // that of a mode spread uniformly over the cell: these regions are small
    // (a few percent of the cell), so no mode ever concentrates an absolute
    // majority of its mass in one, but localized modes are enhanced by a
    // large factor. Between the two features, the winner must take the given
    // majority of the localized mass.
    constexpr double kMinEnhancement = 2.0;
    const double e_slit =
        slit_area > 0.0 ? (slit_mass / total) / (slit_area / cell_area) : 0.0;
    const double e_surf =
        surf_area > 0.0 ? (surf_mass / total) / (surf_area / cell_area) : 0.0;
    const double localized = slit_mass + surf_mass;
    if (localized <= 0.0) return Classification::Unclassified;
    if (e_slit >= kMinEnhancement && slit_mass / localized > majority)
        return Classification::Cavity;
    if (e_surf >= kMinEnhancement && surf_mass / localized > majority)
        return Classification::SurfacePlasmon;
    return Classification::Unclassified;
}

void export_eigenfunction(const Mesh& mesh, const Eigen::VectorXcd& eigvec,
                          const std::string& path, double kappa, cdouble k,
                          const std::string& mesh_ref, const std::string& mesh_hash) {
    if (eigvec.size() < mesh.node_count())
        throw Error("export_eigenfunction: eigenvector shorter than node count");
    Eigen::VectorXcd u = eigvec.head(mesh.node_count());
    const double umax = u.cwiseAbs().maxCoeff();
    if (umax > 0.0) u /= umax;
    std::ofstream out(path);
    if (!out) throw Error("cannot open field file: " + path);
    char buf[160];
    out << "gratres-field 1\n";
    out << "nodes " << mesh.node_count() << "\n";
    std::snprintf(buf, sizeof(buf), "kappa %.17g\n", kappa);
    out << buf;
    std::snprintf(buf, sizeof(buf), "k %.17g %.17g\n", k.real(), k.imag());
    out << buf;
    out << "mesh " << (mesh_ref.empty() ? "-" : mesh_ref) << " "
        << (mesh_hash.empty() ? "-" : mesh_hash) << "\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", mesh.nodes(i, 0),
                      mesh.nodes(i, 1), u(i).real(), u(i).imag());
        out << buf;
    }
}

Eigen::VectorXcd import_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open field file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "gratres-field" || version != 1)
        throw ParseError(1, "not a gratres field file: " + path);
    std::string word;
    long n = 0;
    in >> word >> n;
    if (word != "nodes" || n < 0) throw ParseError(2, "bad node count header");
    double tmp;
    in >> word >> tmp;                    // kappa
    in >> word >> tmp >> tmp;             // k
    std::string ref, hash;
    in >> word >> ref >> hash;            // mesh
    Eigen::VectorXcd u(n);
    for (long i = 0; i < n; ++i) {
        double x, y, re, im;
        if (!(in >> x >> y >> re >> im)) throw ParseError(6 + i, "truncated field file");
        u(i) = cdouble(re, im);
    }
    return u;
}

namespace {

// Provenance hash of the physics configuration. The output directory is
// normalized away: where results land must not change their identity.
std::string config_identity_hash(const RunConfig& config) {
    RunConfig c = config;
    c.output_dir = ".";
    return content_hash(dump_effective_config(c));
}

} // namespace

Mesh build_mesh(const RunConfig& config) {
    Mesh mesh = config.mesh_file ? import_mesh(*config.mesh_file)
                                 : generate_mesh(config.geometry, config.target_h,
                                                 config.grading);
    for (int i = 0; i < config.refine_levels; ++i) mesh = refine_uniform(mesh);
    return mesh;
}

RunOutcome run_solve(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const std::string config_hash = config_identity_hash(config);
    const Mesh mesh = build_mesh(config);

    AuditLog audit;
    audit.record({{"event", "run"},
                  {"mode", "solve"},
                  {"config_hash", config_hash},
                  {"nodes", mesh.node_count()},
                  {"triangles", mesh.triangle_count()}});
    SingleSolve s = solve_at_kappa(config, mesh, config.kappa, &audit);

    RunOutcome out;
    out.rows = s.rows;
    out.errors = s.errors;
    out.status = status_of(s.any_ok, !s.errors.empty());

    write_csv(config, out.rows, "eigenvalues.csv", config_hash, config.refine_levels);
    audit.write((fs::path(config.output_dir) / "audit.jsonl").string());

    if (config.write_fields) {
        const std::string mesh_path =
            (fs::path(config.output_dir) / "mesh.txt").string();
        export_mesh(mesh, mesh_path);
        std::ifstream mf(mesh_path);
        std::ostringstream bytes;
        bytes << mf.rdbuf();
        const std::string mesh_hash = content_hash(bytes.str());
        for (std::size_t i = 0; i < s.fields.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "field_%03zu.txt", i);
            export_eigenfunction(mesh, s.fields[i].second,
                                 (fs::path(config.output_dir) / name).string(),
                                 config.kappa, out.rows[i].k, "mesh.txt", mesh_hash);
        }
    }
    return out;
}

RunOutcome run_band_sweep(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const std::string config_hash = config_identity_hash(config);
    const Mesh mesh = build_mesh(config);
    AuditLog audit;
    audit.record({{"event", "run"},
                  {"mode", "sweep"},
                  {"config_hash", config_hash},
                  {"nodes", mesh.node_count()},
                  {"kappa_count", config.kappa_count}});

    RunOutcome out;
    bool any_ok = false;
    std::vector<std::vector<ResultRow>> per_kappa;
    for (int j = 0; j < config.kappa_count; ++j) {
        const double kappa =
            (M_PI / config.geometry.d) * j / (config.kappa_count - 1);
        SingleSolve s = solve_at_kappa(config, mesh, kappa, &audit);
        any_ok = any_ok || s.any_ok;
        for (const std::string& e : s.errors) out.errors.push_back(e);
        per_kappa.push_back(std::move(s.rows));
    }

    // Nearest-neighbor branch continuation in Re k across kappa samples.
    int next_branch = 0;
    std::vector<std::pair<int, double>> open; // (branch, last Re k)
    for (std::vector<ResultRow>& rows : per_kappa) {
        std::vector<std::pair<int, double>> still_open;
        std::vector<bool> used(open.size(), false);
        for (ResultRow& r : rows) {
            int best = -1;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < open.size(); ++b) {
                if (used[b]) continue;
                const double dist = std::abs(open[b].second - r.k.real());
                if (dist < best_dist) {
                    best_dist = dist;
                    best = static_cast<int>(b);
                }
            }
            if (best >= 0) {
                used[best] = true;
                r.branch = open[best].first;
            } else {
                r.branch = next_branch++;
            }
            still_open.emplace_back(r.branch, r.k.real());
        }
        open = std::move(still_open);
        for (ResultRow& r : rows) out.rows.push_back(std::move(r));
    }
    std::sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.kappa != b.kappa) return a.kappa < b.kappa;
        return a.k.real() < b.k.real();
    });

    out.status = status_of(any_ok, !out.errors.empty());
    write_csv(config, out.rows, "band.csv", config_hash, config.refine_levels);
    audit.write((fs::path(config.output_dir) / "audit.jsonl").string());
    return out;
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& config, int levels) {
    if (levels < 4)
        throw ConfigError("mesh.refine", "a convergence ladder needs at least 4 levels");
    fs::create_directories(config.output_dir);

    std::vector<ConvergenceRow> table;
    Mesh mesh = config.mesh_file ? import_mesh(*config.mesh_file)
                                 : generate_mesh(config.geometry, config.target_h,
                                                 config.grading);
    cdouble tracked;
    bool have_tracked = false;
    for (int lvl = 0; lvl < levels; ++lvl) {
        if (lvl > 0) mesh = refine_uniform(mesh);
        AssembledBlocks blocks = assemble_blocks(mesh, config.kappa, config.dtn_order);
        FemNepOperator op(std::move(blocks), config.material);
        std::vector<EigenResult> found =
            solve_region(op, config.regions.front().region, config.solver, nullptr);
        if (found.empty())
            throw Error("convergence study: no eigenvalue found at level " +
                        std::to_string(lvl));
        const EigenResult* pick = &found.front();
        if (have_tracked) {
            for (const EigenResult& r : found)
                if (std::abs(r.k - tracked) < std::abs(pick->k - tracked)) pick = &r;
        } else {
            for (const EigenResult& r : found)
                if (r.k.real() < pick->k.real()) pick = &r;
        }
        tracked = pick->k;
        have_tracked = true;
        table.push_back(ConvergenceRow{lvl, static_cast<int>(op.dimension()), pick->k,
                                       0.0, false});
    }
    for (std::size_t j = 1; j + 1 < table.size(); ++j) {
        const double num = std::abs(table[j].k - table[j - 1].k);
        const double den = std::abs(table[j + 1].k - table[j].k);
        if (den > 1e-300 && num > 0.0) {
            table[j].order = std::log2(num / den);
            table[j].has_order = true;
        }
    }

    const fs::path path = fs::path(config.output_dir) / "convergence.csv";
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path.string());
    out << "level,dofs,re_k,im_k,order\n";
    for (const ConvergenceRow& row : table) {
        out << row.level << "," << row.dofs << "," << csv_complex(row.k) << ",";
        if (row.has_order) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", row.order);
            out << buf;
        }
        out << "\n";
    }
    return table;
}

} // namespace gratres
