#include "gratres/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gratres {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key, "expected a number, got '" + text + "'");
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cf;
    std::istringstream is(text);
    std::string line, section;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no),
                                  "unterminated section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            cf.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no),
                              "expected 'key = value', got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no), "empty key");
        cf.sections_[section][key] = value;
    }
    return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_string(os.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError(section + "." + key, "missing required key");
    return sections_.at(section).at(key);
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_double(section, key, get(section, key));
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? parse_double(section, key, get(section, key)) : fallback;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
    if (!has(section, key)) return fallback;
    const double v = parse_double(section, key, get(section, key));
    const int i = static_cast<int>(std::lround(v));
    if (v != i) throw ConfigError(section + "." + key, "expected an integer");
    return i;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError(section + "." + key, "expected a boolean, got '" + v + "'");
}

void RunConfig::validate() const {
    geometry.validate();
    if (mesh_file && mesh_file->empty())
        throw ConfigError("mesh.file", "mesh file path is empty");
    if (!mesh_file) {
        if (!(target_h > 0.0)) throw ConfigError("mesh.target_h", "must be positive");
        if (!(grading >= 1.0)) throw ConfigError("mesh.grading", "must be >= 1");
    }
    if (refine_levels < 0) throw ConfigError("mesh.refine", "must be >= 0");
    if (dtn_order < 0) throw ConfigError("dtn.order", "must be >= 0");
    if (sweep && kappa_count < 2) throw ConfigError("bloch.kappa_count", "sweep needs >= 2");
    if (regions.empty()) throw ConfigError("solver.region", "at least one region is required");
    if (!(solver.indicator_threshold > 0.0 && solver.indicator_threshold < 1.0))
        throw ConfigError("solver.indicator_threshold", "must lie in (0, 1)");
    if (solver.n_quad < 4) throw ConfigError("solver.n_quad", "must be >= 4");
    if (solver.n_quad_indicator < 4)
        throw ConfigError("solver.n_quad_indicator", "must be >= 4");
    if (solver.probe_width < 1) throw ConfigError("solver.probe_width", "must be >= 1");
    if (!(solver.accept_tol > 0.0) || !(solver.reject_tol >= solver.accept_tol))
        throw ConfigError("solver.reject_tol", "need 0 < accept_tol <= reject_tol");
    if (output_dir.empty()) throw ConfigError("output.directory", "must not be empty");
    const bool has_metal = geometry.has_slab();
    if (has_metal && material.kind() == PermittivityModel::Kind::Vacuum)
        throw ConfigError("material.model", "a slab is present but the material is vacuum");
    if (report_thz && !scaling)
        throw ConfigError("output.thz",
                          "physical frequencies need material.scaling_alpha (and material.c)");
}

RunConfig resolve_run_config(const ConfigFile& file) {
    RunConfig rc;

    // [geometry]
    rc.geometry.d = file.get_double("geometry", "d");
    rc.geometry.ell = file.get_double_or("geometry", "ell", 0.0);
    const std::string slit = file.get_or("geometry", "slit", "none");
    if (slit == "none") {
        rc.geometry.slit = SlitShape::none();
    } else if (slit == "rectangle") {
        rc.geometry.slit = SlitShape::rectangle(file.get_double("geometry", "slit_width"));
    } else if (slit == "trapezoid") {
        rc.geometry.slit = SlitShape::trapezoid(file.get_double("geometry", "slit_top_width"),
                                                file.get_double("geometry", "slit_base_width"));
    } else {
        throw ConfigError("geometry.slit", "unknown slit kind '" + slit + "'");
    }
    rc.geometry.H =
        file.get_double_or("geometry", "H", rc.geometry.ell / 2.0 + rc.geometry.d / 2.0);

    // [material]
    const std::string model = file.get_or("material", "model", "vacuum");
    if (model == "vacuum") {
        rc.material = PermittivityModel::vacuum();
        rc.geometry.metal_kind = GratingGeometry::MetalKind::Dispersive;
    } else if (model == "pec") {
        rc.material = PermittivityModel::pec();
        rc.geometry.metal_kind = GratingGeometry::MetalKind::PEC;
    } else if (model == "drude") {
        rc.material = PermittivityModel::drude_lossless(file.get_double("material", "omega_p_hat"));
        rc.geometry.metal_kind = GratingGeometry::MetalKind::Dispersive;
    } else if (model == "drude-sommerfeld") {
        rc.material = PermittivityModel::drude_sommerfeld(
            file.get_double("material", "omega_p_hat"),
            file.get_double("material", "gamma_hat"));
        rc.geometry.metal_kind = GratingGeometry::MetalKind::Dispersive;
    } else {
        throw ConfigError("material.model", "unknown model '" + model + "'");
    }
    if (file.has("material", "scaling_alpha"))
        rc.scaling = Scaling{file.get_double("material", "scaling_alpha"),
                             file.get_double_or("material", "c", 3.0e8)};

    // [mesh]
    if (file.has("mesh", "file")) {
        if (file.has("mesh", "target_h"))
            throw ConfigError("mesh.file", "give either a mesh file or generator parameters");
        rc.mesh_file = file.get("mesh", "file");
    }
    rc.target_h = file.get_double_or("mesh", "target_h", 0.1);
    rc.grading = file.get_double_or("mesh", "grading", 4.0);
    rc.refine_levels = file.get_int_or("mesh", "refine", 0);

    // [dtn]
    rc.dtn_order = file.get_int_or("dtn", "order", 50);

    // [bloch]
    if (file.has("bloch", "kappa_count")) {
        rc.sweep = true;
        rc.kappa_count = file.get_int_or("bloch", "kappa_count", 0);
    } else {
        rc.kappa = file.get_double_or("bloch", "kappa", 0.0);
    }

    // [solver]
    SolverConfig& s = rc.solver;
    s.indicator_threshold = file.get_double_or("solver", "indicator_threshold", 0.2);
    s.svd_tol = file.get_double_or("solver", "svd_tol", 1e-6);
    s.probe_width = file.get_int_or("solver", "probe_width", 24);
    s.max_probe_width = file.get_int_or("solver", "max_probe_width", 192);
    s.accept_tol = file.get_double_or("solver", "accept_tol", 1e-12);
    s.reject_tol = file.get_double_or("solver", "reject_tol", 1e-5);
    s.refine_radius_factor = file.get_double_or("solver", "refine_radius_factor", 0.1);
    s.rng_seed = static_cast<std::uint64_t>(file.get_double_or("solver", "seed", 7122022));
    s.max_recursion_depth = file.get_int_or("solver", "max_recursion_depth", 3);
    s.n_quad = file.get_int_or("solver", "n_quad", 64);
    s.n_quad_indicator = file.get_int_or("solver", "n_quad_indicator", 16);
    s.max_inverse_iterations = file.get_int_or("solver", "max_inverse_iterations", 200);
    s.relative_validation = file.get_bool_or("solver", "relative_validation", false);

    // region keys: region, region2, region3, ...  value: "disk cx cy r" or
    // "rect re_min re_max im_min im_max [cover_count]"
    if (file.sections().count("solver")) {
        std::vector<std::pair<std::string, std::string>> region_keys;
        for (const auto& [key, value] : file.sections().at("solver"))
            if (key.rfind("region", 0) == 0) region_keys.emplace_back(key, value);
        std::sort(region_keys.begin(), region_keys.end());
        for (const auto& [key, value] : region_keys) {
            const std::vector<std::string> tok = split_ws(value);
            const std::string where = "solver." + key;
            auto num = [&](std::size_t i) { return parse_double("solver", key, tok.at(i)); };
            RegionSpec spec;
            spec.name = key;
            if (!tok.empty() && tok[0] == "disk" && tok.size() == 4) {
                spec.region = Region::disk(cdouble(num(1), num(2)), num(3));
            } else if (!tok.empty() && tok[0] == "rect" &&
                       (tok.size() == 5 || tok.size() == 6)) {
                spec.region = Region::rectangle(num(1), num(2), num(3), num(4),
                                                tok.size() == 6
                                                    ? static_cast<int>(num(5))
                                                    : 80);
            } else {
                throw ConfigError(where,
                                  "expected 'disk cx cy r' or "
                                  "'rect re_min re_max im_min im_max [count]'");
            }
            rc.regions.push_back(std::move(spec));
        }
    }

    // [output]
    const char* env_dir = std::getenv("GRATRES_OUTPUT_DIR");
    rc.output_dir = file.get_or("output", "directory", env_dir ? env_dir : ".");
    rc.write_fields = file.get_bool_or("output", "fields", false);
    rc.report_thz = file.get_bool_or("output", "thz", false);
    rc.surface_shell_factor = file.get_double_or("output", "surface_shell", 0.05);
    rc.classify_majority = file.get_double_or("output", "classify_majority", 0.5);

    rc.validate();
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    return resolve_run_config(ConfigFile::parse_file(path));
}

std::string dump_effective_config(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "[geometry]\n";
    os << "d = " << c.geometry.d << "\n";
    os << "ell = " << c.geometry.ell << "\n";
    os << "H = " << c.geometry.H << "\n";
    switch (c.geometry.slit.kind) {
        case SlitShape::Kind::None:
            os << "slit = none\n";
            break;
        case SlitShape::Kind::Rectangle:
            os << "slit = rectangle\n";
            os << "slit_width = " << c.geometry.slit.top_width << "\n";
            break;
        case SlitShape::Kind::Trapezoid:
            os << "slit = trapezoid\n";
            os << "slit_top_width = " << c.geometry.slit.top_width << "\n";
            os << "slit_base_width = " << c.geometry.slit.base_width << "\n";
            break;
    }
    os << "\n[material]\n";
    switch (c.material.kind()) {
        case PermittivityModel::Kind::Vacuum:
            os << "model = vacuum\n";
            break;
        case PermittivityModel::Kind::PEC:
            os << "model = pec\n";
            break;
        case PermittivityModel::Kind::DrudeLossless:
            os << "model = drude\n";
            os << "omega_p_hat = " << c.material.omega_p_hat() << "\n";
            break;
        case PermittivityModel::Kind::DrudeSommerfeld:
            os << "model = drude-sommerfeld\n";
            os << "omega_p_hat = " << c.material.omega_p_hat() << "\n";
            os << "gamma_hat = " << c.material.gamma_hat() << "\n";
            break;
    }
    if (c.scaling) {
        os << "scaling_alpha = " << c.scaling->alpha << "\n";
        os << "c = " << c.scaling->c << "\n";
    }
    os << "\n[mesh]\n";
    if (c.mesh_file) {
        os << "file = " << *c.mesh_file << "\n";
    } else {
        os << "target_h = " << c.target_h << "\n";
        os << "grading = " << c.grading << "\n";
    }
    os << "refine = " << c.refine_levels << "\n";
    os << "\n[dtn]\norder = " << c.dtn_order << "\n";
    os << "\n[bloch]\n";
    if (c.sweep)
        os << "kappa_count = " << c.kappa_count << "\n";
    else
        os << "kappa = " << c.kappa << "\n";
    os << "\n[solver]\n";
    os << "indicator_threshold = " << c.solver.indicator_threshold << "\n";
    os << "svd_tol = " << c.solver.svd_tol << "\n";
    os << "probe_width = " << c.solver.probe_width << "\n";
    os << "max_probe_width = " << c.solver.max_probe_width << "\n";
    os << "accept_tol = " << c.solver.accept_tol << "\n";
    os << "reject_tol = " << c.solver.reject_tol << "\n";
    os << "refine_radius_factor = " << c.solver.refine_radius_factor << "\n";
    os << "seed = " << c.solver.rng_seed << "\n";
    os << "max_recursion_depth = " << c.solver.max_recursion_depth << "\n";
    os << "n_quad = " << c.solver.n_quad << "\n";
    os << "n_quad_indicator = " << c.solver.n_quad_indicator << "\n";
    os << "max_inverse_iterations = " << c.solver.max_inverse_iterations << "\n";
    os << "relative_validation = " << (c.solver.relative_validation ? "true" : "false")
       << "\n";
    for (std::size_t i = 0; i < c.regions.size(); ++i) {
        const Region& r = c.regions[i].region;
        os << c.regions[i].name << " = ";
        if (r.kind == Region::Kind::Disk)
            os << "disk " << r.center.real() << " " << r.center.imag() << " " << r.radius
               << "\n";
        else
            os << "rect " << r.re_min << " " << r.re_max << " " << r.im_min << " "
               << r.im_max << " " << r.cover_count << "\n";
    }
    os << "\n[output]\n";
    os << "directory = " << c.output_dir << "\n";
    os << "fields = " << (c.write_fields ? "true" : "false") << "\n";
    os << "thz = " << (c.report_thz ? "true" : "false") << "\n";
    os << "surface_shell = " << c.surface_shell_factor << "\n";
    os << "classify_majority = " << c.classify_majority << "\n";
    return os.str();
}

std::vector<std::string> preset_names() {
    return {"pec-delta005", "pec-delta002", "pec-delta001",
            "sheetmetal",   "drude-gold",   "trapezoid"};
}

std::string preset_config_text(const std::string& name) {
    auto pec = [](const char* width) {
        std::ostringstream os;
        os << "[geometry]\nd = 0.4\nell = 1\nslit = rectangle\nslit_width = " << width
           << "\n\n[material]\nmodel = pec\n\n[mesh]\ntarget_h = 0.1\ngrading = 4\nrefine = 0\n"
              "\n[dtn]\norder = 50\n\n[bloch]\nkappa = 7.853981633974483\n\n[solver]\n"
              "n_quad = 64\nregion = disk 3 0 0.5\n";
        return os.str();
    };
    if (name == "pec-delta005") return pec("0.05");
    if (name == "pec-delta002") return pec("0.02");
    if (name == "pec-delta001") return pec("0.01");
    if (name == "sheetmetal")
        return "[geometry]\nd = 2\nell = 0.04\nslit = rectangle\nslit_width = 0.1\n\n"
               "[material]\nmodel = drude\nomega_p_hat = 1\nscaling_alpha = 1e6\nc = 3e8\n\n"
               "[mesh]\ntarget_h = 0.2\ngrading = 8\nrefine = 2\n\n"
               "[dtn]\norder = 50\n\n[bloch]\nkappa = 0.39269908169872414\n\n"  // pi/(4d)
               "[solver]\nn_quad = 64\nregion = disk 0.2 0 0.15\n\n"
               "[output]\nthz = true\n";
    if (name == "drude-gold")
        return "[geometry]\nd = 1\nell = 1\nslit = rectangle\nslit_width = 0.05\n\n"
               "[material]\nmodel = drude-sommerfeld\nomega_p_hat = 4.6\n"
               "gamma_hat = 0.035833333333333335\nscaling_alpha = 1e7\nc = 3e8\n\n"
               "[mesh]\ntarget_h = 0.12\ngrading = 8\nrefine = 1\n\n"
               "[dtn]\norder = 100\n\n[bloch]\nkappa = 3.141592653589793\n\n"
               "[solver]\nn_quad = 64\nregion = disk 1.625 0 0.9\n";
    if (name == "trapezoid")
        return "[geometry]\nd = 1\nell = 1\nslit = trapezoid\nslit_top_width = 0.05\n"
               "slit_base_width = 0.1\n\n"
               "[material]\nmodel = drude-sommerfeld\nomega_p_hat = 4.6\n"
               "gamma_hat = 0.035833333333333335\nscaling_alpha = 1e7\nc = 3e8\n\n"
               "[mesh]\ntarget_h = 0.12\ngrading = 8\nrefine = 1\n\n"
               "[dtn]\norder = 100\n\n[bloch]\nkappa = 3.141592653589793\n\n"
               "[solver]\nn_quad = 256\nregion = disk 1.5 0 1\n";
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

} // namespace gratres
