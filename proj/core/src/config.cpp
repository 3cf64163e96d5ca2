#include "ecfield/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ecfield/errors.hpp"

namespace ecfield {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& section, const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + ": not a number: '" + v + "'");
    }
    if (pos != v.size()) {
        throw ConfigError("config: [" + section + "] " + key + ": trailing characters in '" + v + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long out;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + ": not an unsigned integer: '" + v + "'");
    }
    if (pos != v.size()) {
        throw ConfigError("config: [" + section + "] " + key + ": trailing characters in '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: [" + section + "] " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> parse_real_list(const std::string& section, const std::string& key,
                                    const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream iss(v);
    std::string piece;
    while (iss >> piece) {
        // allow comma separators as well
        std::replace(piece.begin(), piece.end(), ',', ' ');
        std::istringstream inner(piece);
        std::string num;
        while (inner >> num) out.push_back(parse_real(section, key, num));
    }
    if (out.empty()) {
        throw ConfigError("config: [" + section + "] " + key + ": expected at least one number");
    }
    return out;
}

CovFamily parse_family(const std::string& v) {
    if (v == "squared_exponential") return CovFamily::SquaredExponential;
    if (v == "cosine_mixture") return CovFamily::CosineMixture;
    if (v == "latitude_circle") return CovFamily::LatitudeCircle;
    throw ConfigError("config: [covariance] family: unknown family '" + v + "'");
}

SpaceShape parse_shape(const std::string& v) {
    if (v == "interval") return SpaceShape::Interval;
    if (v == "box") return SpaceShape::Box;
    if (v == "convex_planar" || v == "convex") return SpaceShape::ConvexPlanar;
    throw ConfigError("config: [space] shape: unknown shape '" + v + "'");
}

}  // namespace

CovarianceModel CovarianceSpec::build() const {
    switch (family) {
        case CovFamily::SquaredExponential:
            if (params.size() != 1) {
                throw ConfigError("covariance: squared_exponential takes one parameter (length scale)");
            }
            return CovarianceModel::squared_exponential(params[0]);
        case CovFamily::CosineMixture: {
            if (params.size() < 2 || params.size() % 2 != 0) {
                throw ConfigError(
                    "covariance: cosine_mixture takes an even parameter list (weights then frequencies)");
            }
            const std::size_t m = params.size() / 2;
            std::vector<double> w(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(m));
            std::vector<double> f(params.begin() + static_cast<std::ptrdiff_t>(m), params.end());
            return CovarianceModel::cosine_mixture(std::move(w), std::move(f));
        }
        case CovFamily::LatitudeCircle:
            if (params.size() != 1) {
                throw ConfigError("covariance: latitude_circle takes one parameter (radius)");
            }
            return CovarianceModel::latitude_circle(params[0]);
    }
    throw ConfigError("covariance: unknown family");
}

void ExperimentConfig::validate_for_simulation() const {
    if (mc.u_levels.empty()) throw ConfigError("config: [mc] u_levels is required");
    for (std::size_t i = 0; i < mc.u_levels.size(); ++i) {
        if (!(mc.u_levels[i] > 0.0)) {
            throw ConfigError("config: [mc] u_levels must all be positive");
        }
        if (i > 0 && !(mc.u_levels[i] > mc.u_levels[i - 1])) {
            throw ConfigError("config: [mc] u_levels must be strictly ascending");
        }
    }
    if (mc.n_paths < 10000) {
        throw ConfigError("config: [mc] n_paths must be at least 10000");
    }
    switch (space.shape) {
        case SpaceShape::Interval:
            if (space.lengths.size() != 1) {
                throw ConfigError("config: [space] interval needs lengths = T");
            }
            if (grid.n_grid == 0) {
                throw ConfigError("config: [grid] n_grid is required for interval spaces");
            }
            break;
        case SpaceShape::Box:
            if (space.lengths.size() != 2) {
                throw ConfigError("config: [space] box simulation needs lengths = a b");
            }
            if (grid.n_x == 0 || grid.n_y == 0) {
                throw ConfigError("config: [grid] n_x and n_y are required for box spaces");
            }
            break;
        case SpaceShape::ConvexPlanar:
            throw ConfigError("config: simulation supports interval and box spaces only");
    }
    for (double l : space.lengths) {
        if (!(l > 0.0)) throw ConfigError("config: [space] lengths must be positive");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool have_family = false, have_params = false, have_shape = false;
    bool have_npaths = false;

    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "covariance" && section != "space" && section != "grid" &&
                section != "mc" && section != "fit") {
                throw ConfigError("config: unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("config: key '" + key + "' outside any section");
        }

        if (section == "covariance") {
            if (key == "family") {
                cfg.covariance.family = parse_family(value);
                have_family = true;
            } else if (key == "params") {
                cfg.covariance.params = parse_real_list(section, key, value);
                have_params = true;
            } else if (key == "normalize") {
                cfg.covariance.normalize = parse_bool(section, key, value);
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [covariance]");
            }
        } else if (section == "space") {
            if (key == "shape") {
                cfg.space.shape = parse_shape(value);
                have_shape = true;
            } else if (key == "lengths") {
                cfg.space.lengths = parse_real_list(section, key, value);
            } else if (key == "area") {
                cfg.space.area = parse_real(section, key, value);
            } else if (key == "perimeter") {
                cfg.space.perimeter = parse_real(section, key, value);
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [space]");
            }
        } else if (section == "grid") {
            if (key == "n_grid") {
                cfg.grid.n_grid = static_cast<std::size_t>(parse_u64(section, key, value));
            } else if (key == "n_x") {
                cfg.grid.n_x = static_cast<std::size_t>(parse_u64(section, key, value));
            } else if (key == "n_y") {
                cfg.grid.n_y = static_cast<std::size_t>(parse_u64(section, key, value));
            } else if (key == "pad_factor") {
                cfg.grid.pad_factor = static_cast<std::size_t>(parse_u64(section, key, value));
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [grid]");
            }
        } else if (section == "mc") {
            if (key == "n_paths") {
                cfg.mc.n_paths = static_cast<std::size_t>(parse_u64(section, key, value));
                have_npaths = true;
            } else if (key == "master_seed") {
                cfg.mc.master_seed = parse_u64(section, key, value);
            } else if (key == "u_levels") {
                cfg.mc.u_levels = parse_real_list(section, key, value);
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [mc]");
            }
        } else if (section == "fit") {
            if (key == "min_signal_k") {
                cfg.fit.min_signal_k = parse_real(section, key, value);
            } else if (key == "tol_exp") {
                cfg.fit.tol_exp = parse_real(section, key, value);
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [fit]");
            }
        }
    }
    if (!have_family || !have_params) {
        throw ConfigError("config: [covariance] family and params are required");
    }
    if (!have_shape) throw ConfigError("config: [space] shape is required");
    if (!have_npaths) throw ConfigError("config: [mc] n_paths is required");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace ecfield
