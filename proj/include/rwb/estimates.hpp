#pragma once

#include "rwb/kernels.hpp"
#include "rwb/kinematics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rwb {

/// Closed-form v-derivatives of v0, g, sqrt(s), r = sqrt((n0)^2 - (n.w)^2/R^2)
/// and of the projection (n.w) n^k / |n|^2; d_projection[i][k] is the
/// derivative of component k with respect to v^i.
struct AnalyticDerivatives {
    Vec3 d_v0;
    Vec3 d_g;
    Vec3 d_sqrt_s;
    Vec3 d_r;
    Mat3 d_projection{};
};

/// Throws NearSingularInput when g <= 1e-10, |n| <= 1e-10 or r^2 <= 1e-10.
AnalyticDerivatives analytic_derivatives(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R);

/// Central differences of the same five quantities with step h.
AnalyticDerivatives finite_difference_derivatives(const Momentum3& v, const Momentum3& u, const UnitVector& omega,
                                                  double R, double h);

struct CheckReport {
    std::string lemma_id;
    std::int64_t samples_run = 0;
    std::int64_t violations = 0;
    // Largest excess over tolerance seen by any check, in relative units.
    // Negative values are the remaining margin.
    double max_slack = -1e300;
    nlohmann::ordered_json worst_case = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, double>> metrics;  // fitted constants, exponents, maxima
    std::vector<std::string> notes;

    bool passed() const { return violations == 0; }
    double metric(const std::string& name) const;  // throws if absent
    nlohmann::ordered_json to_json() const;
};

/// Scale factors cycled through by the sampling checks.
inline constexpr double kSampleScales[] = {1.0, 2.0, 10.0, 1e3};

enum class InequalitySuite { L2_1, L2_2_bounds, L3_1, OmegaRelation };

const char* to_string(InequalitySuite suite);

/// Samples (v, u, omega) with v, u standard Gaussian (L2_1 also draws
/// Cauchy-scaled momenta) and R cycling over kSampleScales, and counts
/// violations of every displayed inequality with relative slack 1e-9.
/// For L3_1 only directions inside S^2_R (cutoff constant B) count, in both
/// representations. B <= 0 disables the cutoff and checks defect <= B on the
/// whole sphere, which is expected to fail.
CheckReport verify_inequalities(InequalitySuite suite, std::int64_t nsamples, std::uint64_t seed, double B = 1.0);

/// Conservation of v0 + u0 and v + u, the mass shell and invariance of g,
/// all with relative tolerance 1e-9, for one representation.
CheckReport verify_conservation(Representation rep, std::int64_t nsamples, std::uint64_t seed);

/// OmegaRS applied to omega_hat_from_omega(omega) against OmegaR applied to
/// omega, componentwise within 1e-10 relative.
CheckReport verify_cross_representation(std::int64_t nsamples, std::uint64_t seed);

/// analytic_derivatives against central differences (h = 1e-5) within 1e-6
/// relative on regular samples (g > 0.05, |n| > 0.1, r^2 > 0.01). Also
/// measures the observed finite-difference order.
CheckReport verify_derivative_identities(std::int64_t nsamples, std::uint64_t seed);

/// int |v - u|^-alpha e^-|u|^2 du <= C (1 + |v|^2)^(-alpha/2) for
/// |v| in {0, 1, 5, 20}; fits C at two resolutions and requires the fits to
/// agree within 20%.
CheckReport verify_integral_bound_l23(double alpha, int resolution = 24);

/// int v_phi g^-beta e^-|u|^2 du over |v| in {0, 1, 5, 20} and
/// R in {1, 4, 16, 64}. Fits C in the bound C (beta <= 1) or C R^(beta-1)
/// and its refinement stability, the R-exponent of the integral at v = 0
/// and of the smallest valid bound max over R' <= R. The exponent must be
/// beta - 1 within 0.15 for beta >= 2 and |e| <= 0.1 for the bound when
/// beta <= 1.
CheckReport verify_integral_bound_l33(double beta, int resolution = 24);

/// Quadrature of int int sigma0(w) e^-|u|^2 dw du against 4 pi sigma1 pi^3/2.
CheckReport verify_l32(const KernelParams& params);

/// Finite-difference Jacobians of v' in v (fixed omega resp. omega_hat),
/// fitted constants of the OmegaR and OmegaRS bounds and of the three-case
/// corollaries for each R, and the case-3 doubling ratio.
CheckReport verify_jacobian_bounds(std::int64_t nsamples, std::uint64_t seed,
                                   const std::vector<double>& scales = {1.0, 10.0, 100.0});

/// max_{i,k} |d v'^k / d v^i| by central differences with step h max(1, |v|).
double jacobian_magnitude(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R,
                          Representation rep, double h = 1e-5);
Mat3 jacobian_fd(const Momentum3& v, const Momentum3& u, const UnitVector& omega, double R, Representation rep,
                 double h = 1e-5);

/// Runs a named CLI suite (all, L2_1, L2_2, L2_3, L3_1, L3_2, L3_3,
/// jacobians, omega). B overrides the L3_1 cutoff constants when given.
std::vector<CheckReport> run_suite(const std::string& suite, std::int64_t nsamples, std::uint64_t seed,
                                   const double* B = nullptr);

}  // namespace rwb
