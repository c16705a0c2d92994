#pragma once

#include "rwb/collision.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rwb {

enum class InitialKind { Gaussian, Equilibrium, FromFile };

struct InitialData {
    InitialKind kind = InitialKind::Gaussian;
    double eps = 1e-3;
    double width = 2.0;
    EquilibriumParams equilibrium{};
    std::string path;
};

struct SimConfig {
    ScaleFactorSpec cosmology = EinsteinDeSitter{1.0};
    KernelParams kernel{};
    VGrid grid{4.0, 32};
    QuadratureSpec quad{};
    RepresentationMode rep = RepresentationMode::Adaptive;
    SymmetryMode symmetry = SymmetryMode::Auto;
    double t_end = 1.0;
    double dt = 0.05;
    int snapshot_every = 10;  // steps between snapshots
    int snapshot_stride = 1;  // node decimation in the CSV output
    InitialData initial{};
    std::uint64_t seed = 1;

    void validate() const;
};

/// Builds f0 from config.initial on config.grid (a FromFile snapshot must
/// match the grid).
DistributionField initial_field(const SimConfig& config);

/// Right-hand side dF/dt at time t as a flat vector over grid nodes.
using Rhs = std::function<std::vector<double>(const DistributionField& field, double t)>;

/// Q(f, f) evaluated with the config's cosmology, kernel and quadrature.
Rhs collision_rhs(const SimConfig& config);

struct StepResult {
    DistributionField field;
    double clamped_mass = 0.0;  // trapezoid mass removed by clamping negatives
};

/// Classical RK4. Throws BlowUp when a stage turns non-finite.
StepResult step_rk4(const DistributionField& field, double t, double dt, const Rhs& rhs);

/// Trapezoid integral of f ln f with 0 ln 0 = 0.
double entropy(const DistributionField& field);

struct DiagnosticsRecord {
    double t = 0.0;
    double grid_norm = 0.0;
    double running_norm = 0.0;
    double decay_certificate = 0.0;
    double mass = 0.0;
    Vec3 momentum;
    double energy = 0.0;
    double entropy = 0.0;
    double budget = 0.0;
    double clamped_mass = 0.0;  // cumulative
};

struct RunResult {
    std::vector<DiagnosticsRecord> diagnostics;
    std::vector<Snapshot> snapshots;
    double initial_norm = 0.0;
    double fitted_C = 0.0;  // smallest C with running <= ||f0|| + C running^2 budget on all records
    double lipschitz_estimate = 0.0;
    std::vector<std::string> warnings;
    std::optional<double> blowup_time;
    std::string blowup_message;
    std::int64_t steps = 0;
};

struct RunOptions {
    bool keep_snapshots = true;
    std::function<void(const std::string&)> log;  // progress lines; may be empty
};

/// Integrates to t_end. A blow-up stops the loop and is reported in the
/// result together with the diagnostics gathered so far.
RunResult run(const SimConfig& config, const RunOptions& options = {});

/// Writes snapshots/NNNN.csv and diagnostics.json under dir.
void write_run_outputs(const std::string& dir, const SimConfig& config, const RunResult& result);

std::string diagnostics_json(const RunResult& result);

}  // namespace rwb
