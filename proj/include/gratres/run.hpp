#pragma once

#include <string>
#include <vector>

#include "gratres/config.hpp"
#include "gratres/mesh.hpp"
#include "gratres/solver.hpp"

namespace gratres {

enum class Classification { Cavity, SurfacePlasmon, Unclassified };

const char* to_string(Classification c);

/// One reported eigenvalue with provenance.
struct ResultRow {
    double kappa = 0.0;
    int branch = -1; ///< assigned by sweeps; -1 for single solves
    cdouble k;
    double residual = 0.0;
    int disk_id = -1;
    std::string region_name;
    Classification classification = Classification::Unclassified;
};

enum class RunStatus { Ok, NumericalFailure, Partial };

struct RunOutcome {
    RunStatus status = RunStatus::Ok;
    std::vector<ResultRow> rows;
    std::vector<std::string> errors; ///< per-region / per-kappa failure messages
};

/// Localization heuristic: lumped |u|^2 mass within the slit bounding box
/// (cavity) vs within shell_factor*d of the metal surface outside the slit
/// (surface-plasmon); majority threshold decides, else unclassified.
Classification classify(const Mesh& mesh, const GratingGeometry& geometry,
                        const Eigen::VectorXcd& eigvec, double shell_factor = 0.05,
                        double majority = 0.5);

/// ASCII nodal field: header lines (node count, kappa, k, mesh path + hash),
/// then x1 x2 Re(u) Im(u) per node, normalized to max |u| = 1.
void export_eigenfunction(const Mesh& mesh, const Eigen::VectorXcd& eigvec,
                          const std::string& path, double kappa, cdouble k,
                          const std::string& mesh_ref = "",
                          const std::string& mesh_hash = "");

/// Reads back nodal values written by export_eigenfunction.
Eigen::VectorXcd import_field(const std::string& path);

/// FNV-1a content hash, hex-encoded; used for config/mesh provenance.
std::string content_hash(const std::string& bytes);

/// Build (or load) the mesh described by the config, refinements applied.
Mesh build_mesh(const RunConfig& config);

/// Single-point solve over all configured regions; writes eigenvalues.csv
/// and audit.jsonl into config.output_dir (plus field files if requested).
RunOutcome run_solve(const RunConfig& config);

/// Brillouin-zone sweep over kappa_count samples of [0, pi/d]; writes
/// band.csv with nearest-neighbor branch linking.
RunOutcome run_band_sweep(const RunConfig& config);

struct ConvergenceRow {
    int level = 0;
    int dofs = 0;
    cdouble k;
    double order = 0.0; ///< NaN-free: has_order says whether it is defined
    bool has_order = false;
};

/// Refinement ladder study on one region; tracks the eigenvalue by
/// continuation from the smallest at level 0 and reports relative orders
/// log2(|k^j - k^{j-1}| / |k^{j+1} - k^j|). Writes convergence.csv.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, int levels);

} // namespace gratres
