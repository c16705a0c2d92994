#include "rwb/config.hpp"

#include "rwb/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rwb {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text)
{
    double x = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x)) {
        throw InvalidArgument("expected a number, got '" + text + "'");
    }
    return x;
}

template <class Int>
Int to_int(const std::string& text)
{
    Int x = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) throw InvalidArgument("expected an integer, got '" + text + "'");
    return x;
}

struct Entry {
    std::string value;
    int line = 0;
};

}  // namespace

Vec3 parse_vec3(const std::string& text)
{
    Vec3 out;
    std::stringstream ss(text);
    std::string part;
    int count = 0;
    while (std::getline(ss, part, ',')) {
        if (count == 3) throw InvalidArgument("expected three components in '" + text + "'");
        out[count++] = to_double(trim(part));
    }
    if (count != 3) throw InvalidArgument("expected three components in '" + text + "'");
    return out;
}

ScaleFactorSpec make_cosmology(const std::string& family, double c, double H, double q)
{
    ScaleFactorSpec spec;
    if (family == "eds" || family == "EinsteinDeSitter") {
        spec = EinsteinDeSitter{c};
    } else if (family == "desitter" || family == "DeSitter") {
        spec = DeSitter{H};
    } else if (family == "powerlaw" || family == "PowerLaw") {
        spec = PowerLaw{c, q};
    } else {
        throw InvalidArgument("unknown cosmology family '" + family + "' (expected eds|desitter|powerlaw)");
    }
    validate(spec);
    return spec;
}

ConfigFile parse_config(const std::string& text)
{
    ConfigFile file;
    std::map<std::string, Entry> keys;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (value.empty()) throw ConfigError(lineno, "empty value for " + key);
        if (keys.count(key) != 0) {
            throw ConfigError(lineno, "duplicate key " + key + " (first set on line " +
                                          std::to_string(keys[key].line) + ")");
        }
        keys[key] = {value, lineno};
        file.entries.emplace_back(key, value);
    }

    SimConfig& cfg = file.config;
    std::map<std::string, bool> used;
    // Applies fn to the value of key when present; conversion errors carry
    // the key's line.
    auto with = [&](const std::string& key, auto fn) {
        used[key] = true;
        const auto it = keys.find(key);
        if (it == keys.end()) return false;
        try {
            fn(it->second.value);
        } catch (const InvalidArgument& e) {
            throw ConfigError(it->second.line, key + ": " + e.what());
        }
        return true;
    };
    auto num = [&](const std::string& key, double& target) { with(key, [&](const std::string& v) { target = to_double(v); }); };
    auto integer = [&](const std::string& key, int& target) { with(key, [&](const std::string& v) { target = to_int<int>(v); }); };

    std::string family;
    double c = 1.0;
    double H = 1.0;
    double q = 1.0;
    if (!with("cosmology.family", [&](const std::string& v) { family = v; })) {
        throw ConfigError(0, "missing required key cosmology.family");
    }
    num("cosmology.c", c);
    num("cosmology.H", H);
    num("cosmology.q", q);
    const int family_line = keys["cosmology.family"].line;
    try {
        cfg.cosmology = make_cosmology(family, c, H, q);
    } catch (const InvalidArgument& e) {
        throw ConfigError(family_line, e.what());
    }

    num("kernel.A", cfg.kernel.A);
    num("kernel.b", cfg.kernel.b);
    num("kernel.sigma1", cfg.kernel.sigma1);
    num("kernel.B", cfg.kernel.B);
    with("kernel.angular_mode", [&](const std::string& v) { cfg.kernel.angular_mode = parse_angular_mode(v); });
    num("kernel.smooth_width", cfg.kernel.smooth_width);

    double vmax = cfg.grid.vmax();
    int n = cfg.grid.n();
    num("grid.vmax", vmax);
    integer("grid.n", n);

    integer("quad.angular_nodes", cfg.quad.angular_nodes);
    with("quad.u_integration", [&](const std::string& v) {
        if (v == "reuse") {
            cfg.quad.u_integration = UIntegration::ReuseGrid;
        } else if (v == "subsampled") {
            cfg.quad.u_integration = UIntegration::SubsampledGrid;
        } else {
            throw InvalidArgument("expected reuse|subsampled, got '" + v + "'");
        }
    });
    integer("quad.u_stride", cfg.quad.u_stride);
    with("quad.loss_rule", [&](const std::string& v) {
        if (v == "sphere") {
            cfg.quad.loss_rule = LossRule::SphereRule;
        } else if (v == "exact") {
            cfg.quad.loss_rule = LossRule::ExactSolidAngle;
        } else {
            throw InvalidArgument("expected sphere|exact, got '" + v + "'");
        }
    });
    with("quad.interpolation", [&](const std::string& v) { cfg.quad.interpolation = parse_interpolation(v); });

    with("solver.rep", [&](const std::string& v) { cfg.rep = parse_representation_mode(v); });
    with("solver.symmetry", [&](const std::string& v) { cfg.symmetry = parse_symmetry_mode(v); });
    num("solver.t_end", cfg.t_end);
    num("solver.dt", cfg.dt);
    integer("solver.snapshot_every", cfg.snapshot_every);
    integer("solver.snapshot_stride", cfg.snapshot_stride);
    with("solver.seed", [&](const std::string& v) { cfg.seed = to_int<std::uint64_t>(v); });

    with("initial.kind", [&](const std::string& v) {
        if (v == "gaussian") {
            cfg.initial.kind = InitialKind::Gaussian;
        } else if (v == "equilibrium") {
            cfg.initial.kind = InitialKind::Equilibrium;
        } else if (v == "file") {
            cfg.initial.kind = InitialKind::FromFile;
        } else {
            throw InvalidArgument("expected gaussian|equilibrium|file, got '" + v + "'");
        }
    });
    num("initial.eps", cfg.initial.eps);
    num("initial.width", cfg.initial.width);
    num("initial.alpha", cfg.initial.equilibrium.alpha);
    with("initial.beta", [&](const std::string& v) { cfg.initial.equilibrium.beta = parse_vec3(v); });
    num("initial.gamma", cfg.initial.equilibrium.gamma);
    with("initial.path", [&](const std::string& v) { cfg.initial.path = v; });

    for (const auto& [key, value] : file.entries) {
        if (!used.count(key)) throw ConfigError(keys[key].line, "unknown key " + key);
    }

    // Cross-key validation is not tied to one line.
    try {
        cfg.grid = VGrid(vmax, n);
        cfg.validate();
        if (cfg.initial.kind == InitialKind::FromFile && cfg.initial.path.empty()) {
            throw InvalidArgument("initial.kind = file needs initial.path");
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(0, e.what());
    }
    return file;
}

ConfigFile load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace rwb
