#include "rwb/errors.hpp"
#include "rwb/solver.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace rwb;

namespace {

SimConfig small_config()
{
    SimConfig c;
    c.grid = VGrid(4.0, 10);
    c.kernel.b = 1.0;
    c.quad.angular_nodes = 6;
    c.quad.u_integration = UIntegration::SubsampledGrid;
    c.quad.u_stride = 3;
    c.t_end = 0.4;
    c.dt = 0.1;
    c.snapshot_every = 2;
    return c;
}

// df/dt = -f^2 nodewise, solved exactly by f0 / (1 + f0 t).
const Rhs kRiccati = [](const DistributionField& f, double) {
    std::vector<double> out(f.grid().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -f[i] * f[i];
    return out;
};

double riccati_error(const DistributionField& f0, double T, int steps)
{
    DistributionField f = f0;
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) f = step_rk4(f, s * dt, dt, kRiccati).field;
    double err = 0.0;
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
        err = std::max(err, std::fabs(f[i] - f0[i] / (1.0 + f0[i] * T)));
    }
    return err;
}

}  // namespace

TEST_CASE("RK4 global error is fourth order")
{
    const VGrid g(2.0, 8);
    const auto f0 = DistributionField::from_function(g, [](const Vec3& v) { return 2.0 * std::exp(-norm2(v)); });
    const double e1 = riccati_error(f0, 2.0, 10);
    const double e2 = riccati_error(f0, 2.0, 20);
    CHECK(e1 / e2 >= 10.0);
    CHECK(e1 / e2 <= 24.0);
}

TEST_CASE("zero is a fixed point")
{
    const VGrid g(2.0, 8);
    const StepResult r = step_rk4(DistributionField::zeros(g), 0.0, 0.1, kRiccati);
    for (double x : r.field.values()) CHECK(x == 0.0);
    CHECK(r.clamped_mass == 0.0);
}

TEST_CASE("negative values are clamped and accounted")
{
    const VGrid g(2.0, 8);
    const auto f = DistributionField::from_function(g, [](const Vec3&) { return 1.0; });
    const Rhs drain = [](const DistributionField& x, double) { return std::vector<double>(x.grid().size(), -2.0); };
    const StepResult r = step_rk4(f, 0.0, 1.0, drain);
    for (double x : r.field.values()) CHECK(x == 0.0);
    // Every node lands at -1; the trapezoid mass of the cube is 64.
    CHECK(r.clamped_mass == doctest::Approx(64.0));
}

TEST_CASE("non-finite stage raises BlowUp")
{
    const VGrid g(2.0, 8);
    const auto f = DistributionField::from_function(g, [](const Vec3&) { return 1.0; });
    const Rhs bad = [](const DistributionField& x, double) {
        return std::vector<double>(x.grid().size(), std::numeric_limits<double>::infinity());
    };
    CHECK_THROWS_AS(step_rk4(f, 0.3, 0.1, bad), BlowUp);
}

TEST_CASE("entropy")
{
    const VGrid g(3.0, 13);
    CHECK(entropy(DistributionField::zeros(g)) == 0.0);
    const auto f = DistributionField::from_function(g, [](const Vec3& v) { return std::exp(-norm2(v)); });
    const double a = 0.37;
    std::vector<double> scaled(f.values().begin(), f.values().end());
    for (double& x : scaled) x *= a;
    const double mass = moments(f, 1.0).mass;
    CHECK(entropy(DistributionField(g, scaled)) ==
          doctest::Approx(a * entropy(f) + a * std::log(a) * mass).epsilon(1e-12));
}

TEST_CASE("vacuum run has zero diagnostics")
{
    SimConfig c = small_config();
    c.initial.eps = 0.0;
    const RunResult r = run(c);
    CHECK_FALSE(r.blowup_time.has_value());
    CHECK(r.steps == 4);
    REQUIRE(r.diagnostics.size() == 3);
    for (const DiagnosticsRecord& d : r.diagnostics) {
        CHECK(d.grid_norm == 0.0);
        CHECK(d.running_norm == 0.0);
        CHECK(d.mass == 0.0);
        CHECK(d.energy == 0.0);
        CHECK(d.entropy == 0.0);
        CHECK(d.clamped_mass == 0.0);
    }
    CHECK(r.fitted_C == 0.0);
}

TEST_CASE("small run: records, snapshots and json")
{
    SimConfig c = small_config();
    c.initial.eps = 1e-2;
    const RunResult r = run(c);
    REQUIRE(r.diagnostics.size() == 3);
    CHECK(r.snapshots.size() == 3);
    CHECK(r.diagnostics.back().t == doctest::Approx(0.4));
    CHECK(r.diagnostics[0].budget == 0.0);
    CHECK(r.diagnostics[2].budget > r.diagnostics[1].budget);
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
        CHECK(r.diagnostics[i].running_norm >= r.diagnostics[i - 1].running_norm);
        CHECK(r.diagnostics[i].mass == doctest::Approx(r.diagnostics[0].mass).epsilon(0.01));
    }
    const auto js = nlohmann::json::parse(diagnostics_json(r));
    REQUIRE(js.size() == 3);
    for (const char* key : {"t", "grid_norm", "running_norm", "decay_certificate", "mass", "momentum", "energy",
                            "entropy", "budget", "clamped_mass"}) {
        CHECK(js[0].contains(key));
    }
    CHECK(js[1]["momentum"].size() == 3);
}

TEST_CASE("equilibrium is nearly stationary")
{
    SimConfig c = small_config();
    c.grid = VGrid(4.0, 16);
    c.cosmology = DeSitter{1e-9};
    const auto f = equilibrium(EquilibriumParams{}, 1.0, c.grid);
    const Rhs rhs = collision_rhs(c);
    const auto q = rhs(f, 0.0);
    double qmax = 0.0;
    for (double x : q) qmax = std::max(qmax, std::fabs(x));
    const double dt = 0.01;
    const StepResult next = step_rk4(f, 0.0, dt, rhs);
    double change = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) change = std::max(change, std::fabs(next.field[i] - f[i]));
    CHECK(change <= 1.1 * dt * qmax);
}

TEST_CASE("config validation")
{
    SimConfig c = small_config();
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config();
    c.snapshot_every = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config();
    c.kernel.b = 3.5;
    CHECK_THROWS_AS(run(c), InvalidArgument);
}
