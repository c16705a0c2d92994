#include "rwb/solver.hpp"

#include "rwb/errors.hpp"
#include "rwb/format.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rwb {

void SimConfig::validate() const
{
    rwb::validate(cosmology);
    kernel.validate();
    quad.validate();
    if (!(t_end > 0.0)) throw InvalidArgument("solver.t_end must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("solver.dt must be positive");
    if (snapshot_every < 1) throw InvalidArgument("solver.snapshot_every must be at least 1");
    if (snapshot_stride < 1) throw InvalidArgument("solver.snapshot_stride must be at least 1");
}

DistributionField initial_field(const SimConfig& config)
{
    const InitialData& init = config.initial;
    switch (init.kind) {
    case InitialKind::Gaussian: return gaussian_initial_data(init.eps, init.width, config.grid);
    case InitialKind::Equilibrium: return equilibrium(init.equilibrium, 1.0, config.grid);
    case InitialKind::FromFile: {
        Snapshot snap = read_snapshot_csv(init.path);
        if (!(snap.field.grid().n() == config.grid.n() &&
              std::fabs(snap.field.grid().vmax() - config.grid.vmax()) <= 1e-12 * config.grid.vmax())) {
            throw InvalidArgument("initial snapshot grid does not match grid.vmax / grid.n");
        }
        return DistributionField(config.grid, {snap.field.values().begin(), snap.field.values().end()});
    }
    }
    throw InvalidArgument("unknown initial data kind");
}

Rhs collision_rhs(const SimConfig& config)
{
    return [config](const DistributionField& field, double t) {
        return q_field(field, t, config.cosmology, config.kernel, config.quad, config.rep, config.symmetry).total();
    };
}

namespace {

std::vector<double> axpy(const DistributionField& f, double a, const std::vector<double>& k)
{
    std::vector<double> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = f[i] + a * k[i];
    return out;
}

void check_finite(const std::vector<double>& values, double t)
{
    for (double x : values) {
        if (!std::isfinite(x)) throw BlowUp(t, "non-finite value in Runge-Kutta stage");
    }
}

}  // namespace

StepResult step_rk4(const DistributionField& field, double t, double dt, const Rhs& rhs)
{
    const VGrid& grid = field.grid();
    const auto k1 = rhs(field, t);
    check_finite(k1, t);
    const auto k2 = rhs(DistributionField::stage(grid, axpy(field, 0.5 * dt, k1)), t + 0.5 * dt);
    check_finite(k2, t);
    const auto k3 = rhs(DistributionField::stage(grid, axpy(field, 0.5 * dt, k2)), t + 0.5 * dt);
    check_finite(k3, t);
    const auto k4 = rhs(DistributionField::stage(grid, axpy(field, dt, k3)), t + dt);
    check_finite(k4, t);

    std::vector<double> next(grid.size());
    double clamped = 0.0;
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
        double x = field[idx] + dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
        if (!std::isfinite(x)) throw BlowUp(t + dt, "non-finite value after Runge-Kutta step");
        if (x < 0.0) {
            int i = 0;
            int j = 0;
            int k = 0;
            grid.unflatten(idx, i, j, k);
            clamped -= x * grid.trapezoid_weight(i, j, k);
            x = 0.0;
        }
        next[idx] = x;
    }
    return {DistributionField(grid, std::move(next)), clamped};
}

double entropy(const DistributionField& field)
{
    const VGrid& grid = field.grid();
    const int n = grid.n();
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double f = field.at(i, j, k);
                if (f > 0.0) h += grid.trapezoid_weight(i, j, k) * f * std::log(f);
            }
        }
    }
    return h;
}

namespace {

DiagnosticsRecord record(const SimConfig& config, const DistributionField& field, double t, double running,
                         double clamped)
{
    DiagnosticsRecord r;
    const double R = scale_factor(config.cosmology, t);
    const Moments m = moments(field, R);
    r.t = t;
    r.grid_norm = weighted_norm(field);
    r.running_norm = std::max(running, r.grid_norm);
    r.decay_certificate = decay_certificate(field);
    r.mass = m.mass;
    r.momentum = m.momentum;
    r.energy = m.energy;
    r.entropy = entropy(field);
    r.budget = collision_budget(config.cosmology, config.kernel.b, t);
    r.clamped_mass = clamped;
    return r;
}

// 2 max_v nu(v), nu(v) = loss(v) / f(v): the linearized loss rate bounds the
// stiffness of the grid ODE.
double estimate_lipschitz(const SimConfig& config, const DistributionField& field)
{
    const QField q = q_field(field, 0.0, config.cosmology, config.kernel, config.quad, config.rep, config.symmetry);
    double best = 0.0;
    for (std::size_t idx = 0; idx < field.grid().size(); ++idx) {
        if (field[idx] > 0.0) best = std::max(best, q.loss[idx] / field[idx]);
    }
    return 2.0 * best;
}

}  // namespace

RunResult run(const SimConfig& config, const RunOptions& options)
{
    config.validate();
    auto log = [&](const std::string& line) {
        if (options.log) options.log(line);
    };

    RunResult result;
    DistributionField field = initial_field(config);
    const Rhs rhs = collision_rhs(config);

    result.lipschitz_estimate = estimate_lipschitz(config, field);
    if (config.dt * result.lipschitz_estimate > 0.5) {
        result.warnings.push_back("dt * Lipschitz estimate = " + format_double(config.dt * result.lipschitz_estimate) +
                                  " exceeds 0.5; the explicit step may be unstable");
        log("warning: " + result.warnings.back());
    }

    const auto nsteps = static_cast<std::int64_t>(std::ceil(config.t_end / config.dt - 1e-9));
    double t = 0.0;
    double clamped = 0.0;
    DiagnosticsRecord current = record(config, field, t, 0.0, 0.0);
    result.initial_norm = current.grid_norm;
    double running = current.running_norm;
    result.diagnostics.push_back(current);
    if (options.keep_snapshots) result.snapshots.push_back({t, field});

    for (std::int64_t step = 1; step <= nsteps; ++step) {
        const double dt = std::min(config.dt, config.t_end - t);
        try {
            StepResult next = step_rk4(field, t, dt, rhs);
            field = std::move(next.field);
            clamped += next.clamped_mass;
        } catch (const BlowUp& e) {
            result.blowup_time = e.time();
            result.blowup_message = e.what();
            log(std::string("blow-up: ") + e.what());
            break;
        }
        t = step == nsteps ? config.t_end : step * config.dt;
        result.steps = step;
        running = std::max(running, weighted_norm(field));
        if (step % config.snapshot_every == 0 || step == nsteps) {
            current = record(config, field, t, running, clamped);
            result.diagnostics.push_back(current);
            if (options.keep_snapshots) result.snapshots.push_back({t, field});
            log("t=" + format_double(t) + " running_norm=" + format_double(current.running_norm) +
                " mass=" + format_double(current.mass) + " clamped=" + format_double(clamped));
        }
    }

    for (const DiagnosticsRecord& r : result.diagnostics) {
        if (r.budget > 0.0 && r.running_norm > 0.0) {
            const double c = (r.running_norm - result.initial_norm) / (r.running_norm * r.running_norm * r.budget);
            result.fitted_C = std::max(result.fitted_C, c);
        }
    }
    return result;
}

std::string diagnostics_json(const RunResult& result)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const DiagnosticsRecord& r : result.diagnostics) {
        out.push_back({{"t", r.t},
                       {"grid_norm", r.grid_norm},
                       {"running_norm", r.running_norm},
                       {"decay_certificate", r.decay_certificate},
                       {"mass", r.mass},
                       {"momentum", {r.momentum.x, r.momentum.y, r.momentum.z}},
                       {"energy", r.energy},
                       {"entropy", r.entropy},
                       {"budget", r.budget},
                       {"clamped_mass", r.clamped_mass}});
    }
    return out.dump(2) + "\n";
}

void write_run_outputs(const std::string& dir, const SimConfig& config, const RunResult& result)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root / "snapshots");
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%04zu.csv", i);
        std::ofstream os(root / "snapshots" / name);
        write_snapshot_csv(os, result.snapshots[i].t, result.snapshots[i].field, config.snapshot_stride);
        if (!os) throw std::runtime_error("failed writing snapshot " + (root / "snapshots" / name).string());
    }
    std::ofstream js(root / "diagnostics.json");
    js << diagnostics_json(result);
    if (!js) throw std::runtime_error("failed writing diagnostics.json");
}

}  // namespace rwb
