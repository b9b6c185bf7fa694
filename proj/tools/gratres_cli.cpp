#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gratres/config.hpp"
#include "gratres/mesh.hpp"
#include "gratres/pec_oracle.hpp"
#include "gratres/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitPartial = 3;

int status_to_exit(gratres::RunStatus s) {
    switch (s) {
        case gratres::RunStatus::Ok: return kExitOk;
        case gratres::RunStatus::Partial: return kExitPartial;
        default: return kExitNumerical;
    }
}

gratres::RunConfig load_config(const std::string& config_path, const std::string& preset,
                               const std::string& output_dir) {
    gratres::ConfigFile file;
    if (!preset.empty())
        file = gratres::ConfigFile::parse_string(gratres::preset_config_text(preset));
    else
        file = gratres::ConfigFile::parse_file(config_path);
    gratres::RunConfig rc = gratres::resolve_run_config(file);
    if (!output_dir.empty()) {
        rc.output_dir = output_dir;
        rc.validate();
    }
    return rc;
}

void print_rows(const gratres::RunOutcome& outcome) {
    for (const gratres::ResultRow& r : outcome.rows)
        std::printf("kappa=%-10.6g k = %.10f %+.10f i  residual %.2e  [%s]\n", r.kappa,
                    r.k.real(), r.k.imag(), r.residual,
                    gratres::to_string(r.classification));
    for (const std::string& e : outcome.errors)
        std::fprintf(stderr, "warning: %s\n", e.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonances of dispersive metallic gratings (FEM + contour solver)"};
    app.require_subcommand(1);

    std::string config_path, preset, output_dir;
    bool dump_config = false;

    auto add_config_opts = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("-c,--config", config_path, "run configuration file");
        auto* p = cmd->add_option("-p,--preset", preset,
                                  "bundled preset (pec-delta005, pec-delta002, "
                                  "pec-delta001, sheetmetal, drude-gold, trapezoid)");
        c->excludes(p);
        if (config_required) {
            // exactly one of config/preset
        }
        cmd->add_option("-o,--output-dir", output_dir,
                        "output directory (default: [output] section, then "
                        "$GRATRES_OUTPUT_DIR, then '.')");
        cmd->add_flag("--dump-effective-config", dump_config,
                      "print the resolved configuration and exit");
    };

    CLI::App* solve = app.add_subcommand("solve", "single-point resonance solve");
    add_config_opts(solve, true);

    CLI::App* sweep = app.add_subcommand("sweep", "Brillouin-zone band sweep");
    int sweep_count = 0;
    add_config_opts(sweep, true);
    sweep->add_option("--kappa-count", sweep_count,
                      "number of kappa samples over [0, pi/d] (overrides config)");

    CLI::App* converge = app.add_subcommand("converge", "mesh refinement ladder study");
    int ladder_levels = 4;
    add_config_opts(converge, true);
    converge->add_option("--levels", ladder_levels, "number of ladder levels (>= 4)");

    CLI::App* oracle = app.add_subcommand("oracle", "closed-form validation oracles");
    CLI::App* pec_asym =
        oracle->add_subcommand("pec-asymptotic", "small-slit PEC asymptotic eigenvalue");
    int oracle_m = 1;
    double oracle_kappa = 0.0, oracle_delta = 0.05, oracle_d = 1.0, oracle_tol = 1e-12;
    pec_asym->add_option("-m,--mode", oracle_m, "mode index m >= 1");
    pec_asym->add_option("-k,--kappa", oracle_kappa, "Bloch wavenumber")->required();
    pec_asym->add_option("--delta", oracle_delta, "slit width")->required();
    pec_asym->add_option("-d,--period", oracle_d, "period")->required();
    pec_asym->add_option("--series-tol", oracle_tol, "lattice-sum tail tolerance");

    CLI::App* mesh_cmd = app.add_subcommand("mesh", "mesh generation and inspection");
    CLI::App* mesh_gen = mesh_cmd->add_subcommand("gen", "generate a mesh from a config");
    std::string mesh_out = "mesh.txt";
    add_config_opts(mesh_gen, true);
    mesh_gen->add_option("--mesh-out", mesh_out, "output mesh file");
    CLI::App* mesh_refine = mesh_cmd->add_subcommand("refine", "uniformly refine a mesh");
    std::string mesh_in;
    int refine_times = 1;
    mesh_refine->add_option("mesh", mesh_in, "input mesh file")->required();
    mesh_refine->add_option("--times", refine_times, "number of red refinements");
    mesh_refine->add_option("--mesh-out", mesh_out, "output mesh file");
    CLI::App* mesh_info = mesh_cmd->add_subcommand("info", "print mesh statistics");
    mesh_info->add_option("mesh", mesh_in, "input mesh file")->required();
    mesh_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed() || sweep->parsed() || converge->parsed() ||
            mesh_gen->parsed()) {
            if (config_path.empty() && preset.empty())
                throw gratres::ConfigError("config", "give --config FILE or --preset NAME");
            gratres::RunConfig rc = load_config(config_path, preset, output_dir);
            if (dump_config) {
                std::cout << gratres::dump_effective_config(rc);
                return kExitOk;
            }
            if (solve->parsed()) {
                gratres::RunOutcome outcome = gratres::run_solve(rc);
                print_rows(outcome);
                return status_to_exit(outcome.status);
            }
            if (sweep->parsed()) {
                if (sweep_count > 0) {
                    rc.sweep = true;
                    rc.kappa_count = sweep_count;
                    rc.validate();
                }
                if (!rc.sweep)
                    throw gratres::ConfigError("bloch.kappa_count",
                                               "sweep needs kappa_count >= 2");
                gratres::RunOutcome outcome = gratres::run_band_sweep(rc);
                print_rows(outcome);
                return status_to_exit(outcome.status);
            }
            if (converge->parsed()) {
                auto table = gratres::run_convergence(rc, ladder_levels);
                for (const auto& row : table) {
                    std::printf("level %d  dofs %7d  k = %.10f %+.10f i", row.level,
                                row.dofs, row.k.real(), row.k.imag());
                    if (row.has_order) std::printf("  order %.4f", row.order);
                    std::printf("\n");
                }
                return kExitOk;
            }
            // mesh gen
            gratres::Mesh mesh = gratres::build_mesh(rc);
            const auto out_path =
                std::filesystem::path(rc.output_dir) / mesh_out;
            std::filesystem::create_directories(rc.output_dir);
            gratres::export_mesh(mesh, out_path.string());
            std::printf("wrote %s: %d nodes, %d triangles, mesh size %.6g\n",
                        out_path.string().c_str(), mesh.node_count(),
                        mesh.triangle_count(), mesh.mesh_size());
            return kExitOk;
        }
        if (pec_asym->parsed()) {
            gratres::AsymptoticParams params;
            params.m = oracle_m;
            params.kappa = oracle_kappa;
            params.delta = oracle_delta;
            params.d = oracle_d;
            params.series_tol = oracle_tol;
            const gratres::cdouble k = gratres::asymptotic_eigenvalue(params);
            std::printf("k_%d = %.10f %+.10f i\n", oracle_m, k.real(), k.imag());
            return kExitOk;
        }
        if (mesh_refine->parsed()) {
            gratres::Mesh mesh = gratres::import_mesh(mesh_in);
            for (int i = 0; i < refine_times; ++i) mesh = gratres::refine_uniform(mesh);
            gratres::export_mesh(mesh, mesh_out);
            std::printf("wrote %s: %d nodes, %d triangles\n", mesh_out.c_str(),
                        mesh.node_count(), mesh.triangle_count());
            return kExitOk;
        }
        if (mesh_info->parsed()) {
            gratres::Mesh mesh = gratres::import_mesh(mesh_in);
            std::printf("nodes      %d\n", mesh.node_count());
            std::printf("triangles  %d\n", mesh.triangle_count());
            std::printf("mesh size  %.8g\n", mesh.mesh_size());
            std::printf("total area %.8g\n", mesh.total_area());
            std::printf("metal area %.8g\n", mesh.metal_area());
            std::printf("pairs      %zu\n", mesh.pairs.size());
            return kExitOk;
        }
    } catch (const gratres::ConfigError& e) {
        std::fprintf(stderr, "config error [%s]: %s\n", e.key.c_str(), e.what());
        return kExitConfig;
    } catch (const gratres::ParseError& e) {
        std::fprintf(stderr, "parse error (line %ld): %s\n", e.line, e.what());
        return kExitConfig;
    } catch (const gratres::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitConfig;
}
