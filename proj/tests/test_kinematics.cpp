#include "rwb/errors.hpp"
#include "rwb/kinematics.hpp"
#include "rwb/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace rwb;

namespace {

const Vec3 kX{1, 0, 0};
const Vec3 kY{0, 1, 0};
const double kScales[] = {1.0, 2.0, 10.0, 1e3};

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b))); }

}  // namespace

TEST_CASE("lift")
{
    CHECK(lift({0, 0, 0}, 1.0) == 1.0);
    CHECK(lift(kX, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(lift({3, 4, 0}, 5.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("collision scalars")
{
    SUBCASE("coincident momenta")
    {
        const CollisionScalars sc = collision_scalars({0.3, -1.2, 2.0}, {0.3, -1.2, 2.0}, 3.0);
        CHECK(sc.g == 0.0);
        CHECK(sc.s == 4.0);
        CHECK(sc.v_phi == 0.0);
    }
    SUBCASE("head-on")
    {
        const CollisionScalars sc = collision_scalars(kX, -kX, 1.0);
        CHECK(sc.g == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(sc.s == doctest::Approx(8.0).epsilon(1e-14));
        CHECK(sc.v_phi == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("g <= 2 sqrt(v0 u0)")
    {
        Rng rng(11);
        for (int i = 0; i < 2000; ++i) {
            const double R = kScales[i % 4];
            const Vec3 v = rng.gaussian3();
            const Vec3 u = rng.gaussian3();
            const CollisionScalars sc = collision_scalars(v, u, R);
            CHECK(sc.g <= 2.0 * std::sqrt(sc.v0 * sc.u0) * (1 + 1e-12));
        }
    }
    SUBCASE("agrees with long double defining form")
    {
        Rng rng(12);
        for (int i = 0; i < 2000; ++i) {
            const double R = kScales[i % 4];
            const Vec3 v = rng.gaussian3();
            const Vec3 u = rng.gaussian3();
            const long double R2 = static_cast<long double>(R) * R;
            auto l = [&](const Vec3& x) {
                return std::sqrt(1.0L + (static_cast<long double>(x.x) * x.x + static_cast<long double>(x.y) * x.y +
                                         static_cast<long double>(x.z) * x.z) / R2);
            };
            const Vec3 d = v - u;
            const long double dd = static_cast<long double>(d.x) * d.x + static_cast<long double>(d.y) * d.y +
                                   static_cast<long double>(d.z) * d.z;
            const long double diff = l(v) - l(u);
            const long double g2 = -diff * diff + dd / R2;
            const CollisionScalars sc = collision_scalars(v, u, R);
            CHECK(rel(sc.g * sc.g, static_cast<double>(g2)) < 1e-8);
        }
    }
}

TEST_CASE("post-collision maps, head-on example")
{
    const CollisionOutcome r = post_collision_omega_R(kX, -kX, UnitVector(kY), 1.0);
    CHECK(max_abs(r.v_prime - kY) < 1e-14);
    CHECK(max_abs(r.u_prime + kY) < 1e-14);
    CHECK(r.v0_prime == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.u0_prime == doctest::Approx(std::sqrt(2.0)));

    const CollisionOutcome rs = post_collision_omega_RS(kX, -kX, UnitVector(kY), 1.0);
    CHECK(max_abs(rs.v_prime - kY) < 1e-14);
    CHECK(max_abs(rs.u_prime + kY) < 1e-14);

    const NewtonianOutcome nr = newtonian_post_collision(kX, -kX, UnitVector(kY));
    CHECK(max_abs(nr.v_prime - kY) < 1e-14);
    CHECK(max_abs(nr.u_prime + kY) < 1e-14);

    CHECK(energy_defect(kX, -kX, UnitVector(kY), 1.0, Representation::OmegaR) == doctest::Approx(0.0));
}

TEST_CASE("g = 0 leaves momenta unchanged")
{
    const Vec3 v{0.4, -2.0, 1.5};
    const UnitVector w = UnitVector::normalized({1, 2, 3});
    for (Representation rep : {Representation::OmegaR, Representation::OmegaRS}) {
        const CollisionOutcome o = post_collision(v, v, w, 2.0, rep);
        CHECK(max_abs(o.v_prime - v) < 1e-14);
        CHECK(max_abs(o.u_prime - v) < 1e-14);
        CHECK(energy_defect(v, v, w, 2.0, rep) == doctest::Approx(0.0));
    }
    const NewtonianOutcome nr = newtonian_post_collision(v, v, w);
    CHECK(max_abs(nr.v_prime - v) < 1e-14);
}

TEST_CASE("conservation on random samples")
{
    Rng rng(3);
    for (int i = 0; i < 4000; ++i) {
        const double R = kScales[i % 4];
        const Vec3 v = rng.gaussian3();
        const Vec3 u = rng.gaussian3();
        const UnitVector w = rng.unit_vector();
        const double g = collision_scalars(v, u, R).g;
        for (Representation rep : {Representation::OmegaR, Representation::OmegaRS}) {
            const CollisionOutcome o = post_collision(v, u, w, R, rep);
            CHECK(rel(o.v0_prime + o.u0_prime, lift(v, R) + lift(u, R)) < 1e-9);
            CHECK(max_abs(o.v_prime + o.u_prime - v - u) < 1e-9 * std::max(1.0, norm(v + u)));
            CHECK(rel(o.v0_prime, lift(o.v_prime, R)) < 1e-9);
            CHECK(std::fabs(collision_scalars(o.v_prime, o.u_prime, R).g - g) < 1e-9 * std::max(g, 1.0));
        }
        const NewtonianOutcome nr = newtonian_post_collision(v, u, w);
        CHECK(rel(norm2(nr.v_prime) + norm2(nr.u_prime), norm2(v) + norm2(u)) < 1e-12);
    }
}

TEST_CASE("omega_hat relation")
{
    const Vec3 v{1.0, 0.5, -0.2};
    const Vec3 u{-0.3, 0.8, 0.7};
    const Vec3 n = v + u;
    SUBCASE("perpendicular to n")
    {
        const UnitVector w = UnitVector::normalized(cross(n, {0, 0, 1}));
        CHECK(max_abs(omega_hat_from_omega(v, u, w, 2.0).vec() - w.vec()) < 1e-12);
    }
    SUBCASE("parallel to n")
    {
        const UnitVector w = UnitVector::normalized(n);
        CHECK(max_abs(omega_hat_from_omega(v, u, w, 2.0).vec() - w.vec()) < 1e-12);
    }
    SUBCASE("maps R outcome to RS outcome")
    {
        Rng rng(5);
        for (int i = 0; i < 2000; ++i) {
            const double R = kScales[i % 4];
            const Vec3 a = rng.gaussian3();
            const Vec3 b = rng.gaussian3();
            const UnitVector w = rng.unit_vector();
            const UnitVector hat = omega_hat_from_omega(a, b, w, R);
            const double nw = dot(a + b, w.vec());
            const double nh = dot(a + b, hat.vec());
            CHECK(std::fabs(nh) <= std::fabs(nw) * (1 + 1e-12) + 1e-15);
            CHECK(nh * nw >= 0.0);
            const CollisionOutcome x = post_collision_omega_R(a, b, w, R);
            const CollisionOutcome y = post_collision_omega_RS(a, b, hat, R);
            CHECK(max_abs(x.v_prime - y.v_prime) < 1e-10 * std::max(1.0, max_abs(x.v_prime)));
        }
    }
}

TEST_CASE("cutoff set")
{
    const Vec3 v{2.0, 1.0, 0.0};
    const Vec3 u{-1.0, 0.5, 3.0};
    CHECK(cutoff_contains(v, u, UnitVector::normalized(v + u), 1.0, 1e-6));
    CHECK(cutoff_contains(v, v, UnitVector(kY), 1.0, 1e-6));

    const UnitVector w = UnitVector::normalized({0.2, -1.0, 0.4});
    const double B = 0.05;
    CHECK_FALSE(cutoff_contains(v, u, w, 1.0, B));
    const double R0 = cutoff_entry_scale(v, u, w, B);
    CHECK(R0 > 1.0);
    for (double R = R0; R < 1e4 * R0; R *= 1.7) CHECK(cutoff_contains(v, u, w, R, B));
    // Monotone: the quantity never increases with R.
    double prev = cutoff_quantity(v, u, w, 0.1);
    for (double R = 0.2; R < 1e3; R *= 1.5) {
        const double q = cutoff_quantity(v, u, w, R);
        CHECK(q <= prev * (1 + 1e-12));
        prev = q;
    }
}

TEST_CASE("energy defect bounded on the cutoff set")
{
    Rng rng(9);
    for (double B : {0.1, 1.0, 10.0}) {
        for (int i = 0; i < 4000; ++i) {
            const double R = kScales[i % 4];
            const Vec3 v = rng.gaussian3();
            const Vec3 u = rng.gaussian3();
            const UnitVector w = rng.unit_vector();
            if (!cutoff_contains(v, u, w, R, B)) continue;
            const UnitVector hat = omega_hat_from_omega(v, u, w, R);
            CHECK(energy_defect(v, u, w, R, Representation::OmegaR) <= B + 1e-9);
            CHECK(energy_defect(v, u, hat, R, Representation::OmegaRS) <= B + 1e-9);
        }
    }
}

TEST_CASE("input validation")
{
    CHECK_THROWS_AS(UnitVector({1, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(lift(kX, 0.0), InvalidArgument);
    CHECK_THROWS_AS(collision_scalars(kX, kY, -1.0), InvalidArgument);
}
