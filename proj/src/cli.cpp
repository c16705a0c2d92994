#include "rwb/cli.hpp"

#include "rwb/config.hpp"
#include "rwb/cosmology.hpp"
#include "rwb/errors.hpp"
#include "rwb/estimates.hpp"
#include "rwb/format.hpp"
#include "rwb/kernels.hpp"
#include "rwb/kinematics.hpp"
#include "rwb/parallel.hpp"
#include "rwb/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace rwb {

namespace {

constexpr const char* kToolVersion = "rwb 0.1.0";

using ojson = nlohmann::ordered_json;

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

ojson vec_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    namespace fs = std::filesystem;
    ConfigFile file;
    try {
        file = load_config(config_path);
    } catch (const ConfigError& e) {
        err << config_path << ": " << e.what() << "\n";
        return kExitUsage;
    }
    const SimConfig& config = file.config;

    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) {
        err << "cannot create output directory " << out_dir << ": " << ec.message() << "\n";
        return kExitUsage;
    }

    ojson manifest;
    ojson cfg = ojson::object();
    for (const auto& [key, value] : file.entries) cfg[key] = value;
    manifest["config_path"] = config_path;
    manifest["config"] = cfg;
    manifest["seeds"] = {{"solver.seed", config.seed}};
    manifest["tool_version"] = kToolVersion;
    manifest["threads"] = worker_count();
    manifest["start_time"] = utc_timestamp();
    manifest["outputs"] = {{"manifest", "manifest.json"},
                           {"log", "run.log"},
                           {"diagnostics", "diagnostics.json"},
                           {"snapshots", "snapshots/"}};
    {
        std::ofstream ms(root / "manifest.json");
        ms << manifest.dump(2) << "\n";
        if (!ms) {
            err << "cannot write " << (root / "manifest.json").string() << "\n";
            return kExitUsage;
        }
    }

    std::ofstream log(root / "run.log");
    auto emit = [&](const std::string& line) {
        log << line << "\n";
        log.flush();
    };
    emit("start " + manifest["start_time"].get<std::string>());
    emit("cosmology " + describe(config.cosmology) + " b=" + format_double(config.kernel.b));

    RunOptions options;
    options.keep_snapshots = true;
    options.log = emit;
    RunResult result;
    try {
        result = run(config, options);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        emit(std::string("error: ") + e.what());
        return kExitUsage;
    }
    write_run_outputs(out_dir, config, result);

    emit("lipschitz_estimate " + format_double(result.lipschitz_estimate));
    emit("fitted_C " + format_double(result.fitted_C));
    for (const std::string& w : result.warnings) emit("warning " + w);
    emit("end " + utc_timestamp());

    out << "steps " << result.steps << "\n";
    out << "fitted_C " << format_double(result.fitted_C) << "\n";
    if (!result.diagnostics.empty()) {
        out << "final running_norm " << format_double(result.diagnostics.back().running_norm) << "\n";
    }
    if (result.blowup_time) {
        err << "blow-up: " << result.blowup_message << "\n";
        return kExitBlowUp;
    }
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::int64_t samples, std::uint64_t seed, const double* B, bool json,
               std::ostream& out)
{
    const std::vector<CheckReport> reports = run_suite(suite, samples, seed, B);
    std::int64_t violations = 0;
    for (const CheckReport& r : reports) violations += r.violations;

    if (json) {
        ojson arr = ojson::array();
        for (const CheckReport& r : reports) arr.push_back(r.to_json());
        out << arr.dump(2) << "\n";
    } else {
        char line[160];
        std::snprintf(line, sizeof(line), "%-26s %12s %10s %14s  %s\n", "check", "samples", "violations",
                      "max_slack", "status");
        out << line;
        for (const CheckReport& r : reports) {
            std::snprintf(line, sizeof(line), "%-26s %12lld %10lld %14.6g  %s\n", r.lemma_id.c_str(),
                          static_cast<long long>(r.samples_run), static_cast<long long>(r.violations), r.max_slack,
                          r.passed() ? "ok" : "VIOLATED");
            out << line;
            for (const auto& [name, value] : r.metrics) out << "    " << name << " = " << format_double(value) << "\n";
            for (const std::string& note : r.notes) out << "    note: " << note << "\n";
        }
        out << (violations == 0 ? "all checks passed" : std::to_string(violations) + " violations") << "\n";
    }
    return violations == 0 ? kExitOk : kExitViolations;
}

int cmd_kinematics(const std::string& v_text, const std::string& u_text, const std::string& omega_text, double R,
                   const std::string& rep_text, double B, std::ostream& out)
{
    const Momentum3 v = parse_vec3(v_text);
    const Momentum3 u = parse_vec3(u_text);
    const UnitVector omega(parse_vec3(omega_text));
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("--R must be positive");
    Representation rep;
    if (rep_text == "R") {
        rep = Representation::OmegaR;
    } else if (rep_text == "RS") {
        rep = Representation::OmegaRS;
    } else {
        throw InvalidArgument("--rep must be R or RS");
    }

    auto outcome_json = [](const CollisionOutcome& o) {
        return ojson{{"representation", to_string(o.representation)},
                     {"v_prime", vec_json(o.v_prime)},
                     {"u_prime", vec_json(o.u_prime)},
                     {"v0_prime", o.v0_prime},
                     {"u0_prime", o.u0_prime}};
    };

    const CollisionScalars sc = collision_scalars(v, u, R);
    const CollisionOutcome o = post_collision(v, u, omega, R, rep);
    ojson rec;
    rec["input"] = {{"v", vec_json(v)}, {"u", vec_json(u)}, {"omega", vec_json(omega.vec())}, {"R", R},
                    {"rep", to_string(rep)}};
    rec["scalars"] = {{"v0", sc.v0}, {"u0", sc.u0}, {"g", sc.g}, {"s", sc.s}, {"v_phi", sc.v_phi}};
    rec["outcome"] = outcome_json(o);
    rec["energy_defect"] = energy_defect(v, u, omega, R, rep);
    rec["cutoff"] = {{"B", B}, {"quantity", cutoff_quantity(v, u, omega, R)},
                     {"contains", cutoff_contains(v, u, omega, R, B)}};
    if (rep == Representation::OmegaR) {
        const UnitVector hat = omega_hat_from_omega(v, u, omega, R);
        rec["omega_hat"] = vec_json(hat.vec());
        rec["mapped_outcome"] = outcome_json(post_collision_omega_RS(v, u, hat, R));
    }
    out << rec.dump(2) << "\n";
    return kExitOk;
}

int cmd_integrability(const std::string& family, double b, double c, double H, double q, std::ostream& out)
{
    const ScaleFactorSpec spec = make_cosmology(family, c, H, q);
    const IntegrabilityReport r = integrability(spec, b);
    out << "cosmology " << describe(spec) << "\n";
    out << "b " << format_double(b) << "\n";
    out << "analytic " << (r.converges ? "converges" : "diverges") << "\n";
    out << (r.exponential ? "decay_rates " : "exponents ") << format_double(r.exponent_cubic) << " "
        << format_double(r.exponent_soft) << "\n";
    out << "integral_to_T " << format_double(r.integral_to_horizon) << " (T=" << format_double(r.horizon) << ")\n";
    out << "tail_bound " << format_double(r.tail_bound) << "\n";
    out << "decade_ratio " << format_double(r.decade_ratio) << "\n";
    out << "numeric " << (r.numeric_converges ? "converges" : "diverges") << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spatially homogeneous relativistic Boltzmann equation in a Robertson-Walker background", "rwb"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    std::string out_dir;
    auto* run_cmd = app.add_subcommand("run", "Integrate a configured simulation");
    run_cmd->add_option("config", config_path, "Config file (key = value lines)")->required();
    run_cmd->add_option("--out", out_dir, "Output directory")->required();

    std::string suite;
    std::int64_t samples = 1000000;
    std::uint64_t seed = 1;
    double B_value = 0.0;
    bool json = false;
    auto* verify_cmd = app.add_subcommand("verify", "Run inequality and identity checks");
    verify_cmd->add_option("suite", suite, "all|L2_1|L2_2|L2_3|L3_1|L3_2|L3_3|jacobians|omega")->required();
    verify_cmd->add_option("--samples", samples, "Samples per sampling check")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", seed, "Random seed");
    auto* B_opt = verify_cmd->add_option("--B", B_value, "Cutoff constant for L3_1");
    verify_cmd->add_flag("--json", json, "Print reports as JSON");

    std::string v_text;
    std::string u_text;
    std::string omega_text;
    double R = 1.0;
    std::string rep_text = "R";
    double kin_B = 1.0;
    auto* kin_cmd = app.add_subcommand("kinematics", "Evaluate one binary collision");
    kin_cmd->add_option("--v", v_text, "x,y,z")->required();
    kin_cmd->add_option("--u", u_text, "x,y,z")->required();
    kin_cmd->add_option("--omega", omega_text, "unit vector x,y,z")->required();
    kin_cmd->add_option("--R", R, "Scale factor");
    kin_cmd->add_option("--rep", rep_text, "R|RS");
    kin_cmd->add_option("--B", kin_B, "Cutoff constant");

    std::string family;
    double b = 0.0;
    double c = 1.0;
    double H = 1.0;
    double q = 1.0;
    auto* int_cmd = app.add_subcommand("integrability", "Check the integrability condition");
    int_cmd->add_option("--family", family, "eds|desitter|powerlaw")->required();
    int_cmd->add_option("--b", b, "Kernel growth exponent in [0, 3)")->required();
    int_cmd->add_option("--c", c, "Rate constant (eds, powerlaw)");
    int_cmd->add_option("--H", H, "Hubble rate (desitter)");
    int_cmd->add_option("--q", q, "Exponent (powerlaw)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        app.exit(e, os, os);
        err << os.str();
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, out_dir, out, err);
        if (*verify_cmd) return cmd_verify(suite, samples, seed, B_opt->count() > 0 ? &B_value : nullptr, json, out);
        if (*kin_cmd) return cmd_kinematics(v_text, u_text, omega_text, R, rep_text, kin_B, out);
        if (*int_cmd) return cmd_integrability(family, b, c, H, q, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace rwb
