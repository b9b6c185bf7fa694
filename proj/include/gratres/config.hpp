#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gratres/geometry.hpp"
#include "gratres/materials.hpp"
#include "gratres/solver.hpp"

namespace gratres {

/// One search region as declared in a config file.
struct RegionSpec {
    Region region;
    std::string name; ///< key in the config file (region, region2, ...)
};

/// Fully resolved run configuration (defaults applied).
struct RunConfig {
    GratingGeometry geometry;

    PermittivityModel material = PermittivityModel::vacuum();
    std::optional<Scaling> scaling; ///< present iff physical units requested

    // mesh: exactly one of {mesh_file, generator parameters}
    std::optional<std::string> mesh_file;
    double target_h = 0.1;
    double grading = 4.0;
    int refine_levels = 0;

    int dtn_order = 50;

    // bloch: single kappa, or sweep over [0, pi/d] with kappa_count samples
    double kappa = 0.0;
    bool sweep = false;
    int kappa_count = 0;

    SolverConfig solver;
    std::vector<RegionSpec> regions;

    std::string output_dir = ".";
    bool write_fields = false;
    bool report_thz = false;
    double surface_shell_factor = 0.05; ///< classification shell, in units of d
    double classify_majority = 0.5;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Flat sectioned key = value text. '#' and ';' start comments; keys are
/// case-sensitive; later duplicates override earlier ones.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Parse + resolve defaults + validate.
RunConfig load_run_config(const std::string& path);
RunConfig resolve_run_config(const ConfigFile& file);

/// All effective values, in the same flat format, defaults included.
std::string dump_effective_config(const RunConfig& config);

/// Bundled presets: pec-delta005, pec-delta002, pec-delta001, sheetmetal,
/// drude-gold, trapezoid. Throws ConfigError for unknown names.
std::string preset_config_text(const std::string& name);
std::vector<std::string> preset_names();

} // namespace gratres
