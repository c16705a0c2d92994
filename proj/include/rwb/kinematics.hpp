#pragma once

#include "rwb/vec3.hpp"

namespace rwb {

/// Post-collisional parametrization. OmegaR is the generalized
/// Glassey-Strauss parameter, OmegaRS the generalized Strain parameter. At
/// R = 1 OmegaR coincides with the Minkowski parameter.
enum class Representation { OmegaR, OmegaRS };

const char* to_string(Representation rep);

struct CollisionScalars {
    double v0 = 1.0;
    double u0 = 1.0;
    double g = 0.0;
    double s = 4.0;
    double v_phi = 0.0;  // Moller velocity g sqrt(s) / (v0 u0)
};

struct CollisionOutcome {
    Momentum3 v_prime;
    Momentum3 u_prime;
    double v0_prime = 1.0;
    double u0_prime = 1.0;
    Representation representation = Representation::OmegaR;
};

/// v0 = sqrt(1 + |v|^2 / R^2).
double lift(const Momentum3& v, double R);

/// g^2 = -(v0 - u0)^2 + |v - u|^2 / R^2 without forming the difference v0 - u0
/// directly (it is rewritten as (|v|^2 - |u|^2) / (R^2 (v0 + u0))). Values
/// in [-1e-12, 0) are clamped to zero; anything more negative throws. When
/// the difference cancels badly the value is recomputed from an equivalent
/// sum of nonnegative terms.
double relative_momentum_squared(const Momentum3& v, const Momentum3& u, double R, double v0, double u0);

CollisionScalars collision_scalars(const Momentum3& v, const Momentum3& u, double R);

CollisionOutcome post_collision_omega_R(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R);
CollisionOutcome post_collision_omega_RS(const Momentum3& v, const Momentum3& u, const UnitVector& omega_hat, double R);
CollisionOutcome post_collision(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R,
                                Representation rep);

/// The direction omega_hat for which the OmegaRS map reproduces the OmegaR
/// outcome of omega. Identity when n = v + u vanishes.
UnitVector omega_hat_from_omega(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R);

struct NewtonianOutcome {
    Momentum3 v_prime;
    Momentum3 u_prime;
};

NewtonianOutcome newtonian_post_collision(const Momentum3& v, const Momentum3& u, const UnitVector& omega);

/// |v|^2 + |u|^2 - |v'|^2 - |u'|^2 for the chosen representation.
double energy_defect(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R, Representation rep);

/// |v - u|^2 |n x omega|^2 / (2 R^2 s), the quantity bounded by B on S^2_R.
double cutoff_quantity(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R);

bool cutoff_contains(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R, double B);

/// A scale factor beyond which (v, u, omega) stays inside S^2_R. R^2 s equals
/// 4 R^2 + (R g)^2 and R g grows with R, so the cutoff quantity is
/// nonincreasing in R; using s >= 4 gives |v - u| |n x omega| / sqrt(8 B).
double cutoff_entry_scale(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double B);

}  // namespace rwb
