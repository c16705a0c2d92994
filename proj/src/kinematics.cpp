#include "rwb/kinematics.hpp"

#include "rwb/errors.hpp"

#include <cmath>
#include <string>

namespace rwb {

namespace {

constexpr double kNegativeG2Tolerance = 1e-12;
constexpr double kTinyN = 1e-12;

void require_positive_scale(double R)
{
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw InvalidArgument("scale factor must be positive and finite, got " + std::to_string(R));
    }
}

}  // namespace

UnitVector::UnitVector(const Vec3& w) : w_(w)
{
    const double len = norm(w);
    if (!std::isfinite(len) || std::fabs(len - 1.0) > 1e-12) {
        throw InvalidArgument("unit vector has norm " + std::to_string(len));
    }
}

UnitVector UnitVector::normalized(const Vec3& w)
{
    const double len = norm(w);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    return UnitVector(w / len, Unchecked{});
}

const char* to_string(Representation rep)
{
    return rep == Representation::OmegaR ? "OmegaR" : "OmegaRS";
}

double lift(const Momentum3& v, double R)
{
    require_positive_scale(R);
    return std::sqrt(1.0 + norm2(v) / (R * R));
}

double relative_momentum_squared(const Momentum3& v, const Momentum3& u, double R, double v0, double u0)
{
    const Vec3 d = v - u;
    const Vec3 n = v + u;
    // R^2 (v0^2 - u0^2) = |v|^2 - |u|^2 = d . n
    const double energy_gap = dot(d, n) / (R * R * (v0 + u0));
    double g2 = norm2(d) / (R * R) - energy_gap * energy_gap;
    if (g2 < 0.0) {
        if (g2 < -kNegativeG2Tolerance) {
            throw InternalError("negative g^2 = " + std::to_string(g2) + " for on-shell momenta");
        }
        g2 = 0.0;
    }
    const double dd = norm2(d) / (R * R);
    if (g2 < 1e-3 * dd) {
        // The difference above lost digits. Same quantity as
        // 2 (|v-u|^2/R^2 + |v x u|^2/R^4) / (1 + v0 u0 + v.u/R^2), where every
        // term is nonnegative once v0 u0 + v.u/R^2 is rationalized for v.u < 0.
        const double vu = dot(v, u) / (R * R);
        double p = v0 * u0 + vu;
        if (vu < 0.0) {
            p = (1.0 + (norm2(v) + norm2(u)) / (R * R) + norm2(cross(v, u)) / (R * R * R * R)) / (v0 * u0 - vu);
        }
        g2 = 2.0 * (dd + norm2(cross(v, u)) / (R * R * R * R)) / (1.0 + p);
    }
    return g2;
}

CollisionScalars collision_scalars(const Momentum3& v, const Momentum3& u, double R)
{
    require_positive_scale(R);
    CollisionScalars sc;
    sc.v0 = lift(v, R);
    sc.u0 = lift(u, R);
    const double g2 = relative_momentum_squared(v, u, R, sc.v0, sc.u0);
    sc.g = std::sqrt(g2);
    sc.s = 4.0 + g2;
    sc.v_phi = sc.g * std::sqrt(sc.s) / (sc.v0 * sc.u0);
    return sc;
}

CollisionOutcome post_collision_omega_R(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R)
{
    const CollisionScalars sc = collision_scalars(v, u, R);
    const Vec3& w = omega.vec();
    const Vec3 n = v + u;
    const double n0 = sc.v0 + sc.u0;
    const double nw = dot(n, w);
    const double r2 = n0 * n0 - nw * nw / (R * R);
    if (!(r2 > 0.0)) {
        throw InternalError("degenerate direction in OmegaR parametrization");
    }
    const double r = std::sqrt(r2);

    CollisionOutcome out;
    out.representation = Representation::OmegaR;
    out.v0_prime = 0.5 * n0 + sc.g / (2.0 * R) * nw / r;
    out.v_prime = 0.5 * n + (R * sc.g * 0.5 * n0 / r) * w;
    out.u_prime = n - out.v_prime;
    out.u0_prime = n0 - out.v0_prime;
    return out;
}

CollisionOutcome post_collision_omega_RS(const Momentum3& v, const Momentum3& u, const UnitVector& omega_hat,
                                         double R)
{
    const CollisionScalars sc = collision_scalars(v, u, R);
    const Vec3& w = omega_hat.vec();
    const Vec3 n = v + u;
    const double n0 = sc.v0 + sc.u0;
    const double sqrt_s = std::sqrt(sc.s);
    const double nw = dot(n, w);
    const double nn = norm2(n);
    // (n.w) n / |n|^2 -> 0 as n -> 0 since |n.w| <= |n|
    const Vec3 projection = nn < kTinyN * kTinyN ? Vec3{} : (nw / nn) * n;

    CollisionOutcome out;
    out.representation = Representation::OmegaRS;
    out.v0_prime = 0.5 * n0 + sc.g / (2.0 * R) * nw / sqrt_s;
    out.v_prime = 0.5 * n + (0.5 * R * sc.g) * (w - projection + (n0 / sqrt_s) * projection);
    out.u_prime = n - out.v_prime;
    out.u0_prime = n0 - out.v0_prime;
    return out;
}

CollisionOutcome post_collision(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R,
                                Representation rep)
{
    return rep == Representation::OmegaR ? post_collision_omega_R(v, u, omega, R)
                                         : post_collision_omega_RS(v, u, omega, R);
}

UnitVector omega_hat_from_omega(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R)
{
    const CollisionScalars sc = collision_scalars(v, u, R);
    const Vec3 n = v + u;
    const double nn = norm2(n);
    if (nn < kTinyN * kTinyN) {
        return omega;
    }
    const Vec3& w = omega.vec();
    const double n0 = sc.v0 + sc.u0;
    const double nw = dot(n, w);
    const double r = std::sqrt(n0 * n0 - nw * nw / (R * R));
    const Vec3 hat = (n0 * w + ((std::sqrt(sc.s) - n0) * nw / nn) * n) / r;
    // analytically unit; renormalizing only strips roundoff
    return UnitVector::normalized(hat);
}

NewtonianOutcome newtonian_post_collision(const Momentum3& v, const Momentum3& u, const UnitVector& omega)
{
    const Vec3 mid = 0.5 * (v + u);
    const Vec3 half = (0.5 * norm(v - u)) * omega.vec();
    return {mid + half, mid - half};
}

double energy_defect(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R, Representation rep)
{
    const CollisionOutcome out = post_collision(v, u, omega, R, rep);
    return norm2(v) + norm2(u) - norm2(out.v_prime) - norm2(out.u_prime);
}

double cutoff_quantity(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R)
{
    const CollisionScalars sc = collision_scalars(v, u, R);
    const Vec3 n = v + u;
    return norm2(v - u) * norm2(cross(n, omega.vec())) / (2.0 * R * R * sc.s);
}

bool cutoff_contains(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R, double B)
{
    return cutoff_quantity(v, u, omega, R) <= B;
}

double cutoff_entry_scale(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double B)
{
    if (!(B > 0.0)) {
        throw InvalidArgument("cutoff constant B must be positive");
    }
    const double k = norm(v - u) * norm(cross(v + u, omega.vec()));
    return std::fmax(1.0, k / std::sqrt(8.0 * B));
}

}  // namespace rwb
