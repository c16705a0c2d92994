#pragma once

#include "rwb/kinematics.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace rwb {

enum class AngularMode { SharpCutoff, SmoothCutoff };

/// Constants of the cutoff scattering-kernel class:
///   0 <= sigma <= A (1 + g^-b) sigma0,  |d_g sigma| <= A' g^(-b-1) sigma0,
///   0 <= sigma0 <= sigma1 * 1_{S^2_R}.
struct KernelParams {
    double A = 1.0;
    double b = 0.0;
    double sigma1 = 1.0;
    double B = 1.0;
    AngularMode angular_mode = AngularMode::SmoothCutoff;
    double smooth_width = 0.1;

    /// Throws InvalidArgument unless 0 <= b < 3 and A, sigma1, B (and the
    /// smooth width, when used) are positive.
    void validate() const;

    /// Constant of the derivative bound satisfied by the reference kernel.
    double derivative_constant() const;
};

/// Angular weight in [0, 1] as a function of the cutoff quantity q. Sharp:
/// 1 for q <= B, else 0. Smooth: 1 for q <= B - width, a C^1 cubic ramp on
/// (B - width, B), and 0 for q >= B, so the support never leaves S^2_R.
double cutoff_weight(const KernelParams& params, double q);

/// Integral over S^2 of cutoff_weight(kappa * sin^2 theta), theta measured
/// from any fixed axis. This is the exact angular measure of the kernel
/// around n, since the cutoff quantity equals kappa |n_hat x omega|^2.
double cutoff_solid_angle(const KernelParams& params, double kappa);

/// Reference kernel A (1 + g^-b) sigma1 w. Returns +inf at g = 0 for b > 0.
double sigma(const KernelParams& params, double g, double weight);
double sigma(const KernelParams& params, double g, bool cutoff_member);

/// -A b g^(-b-1) sigma1 w.
double dsigma_dg(const KernelParams& params, double g, double weight);

/// v_phi * sigma / weight with the g^-b singularity folded in:
/// A sigma1 sqrt(s) (g + g^(1-b)) / (v0 u0). Finite at g = 0 for b <= 1,
/// and the caller never evaluates it at g = 0 otherwise.
double moller_kernel(const KernelParams& params, const CollisionScalars& sc);

/// Evaluator under test: (g, weight) -> (sigma, d_g sigma).
struct KernelEvaluation {
    double value = 0.0;
    double dg = 0.0;
};
using KernelFunction = std::function<KernelEvaluation(double g, double weight)>;

struct KernelClassReport {
    bool passed = true;
    std::int64_t samples = 0;
    std::int64_t violations = 0;
    double max_value_slack = -1e300;       // max of sigma - A (1+g^-b) sigma0
    double max_derivative_slack = -1e300;  // max of |d_g sigma| - A' g^(-b-1) sigma0
    double max_support_slack = -1e300;     // max of sigma0 - sigma1 1_{S^2_R}
};

/// Samples g in (1e-6, 1e3) log-uniformly together with random collision
/// configurations (for the angular weight) and checks the class bounds.
KernelClassReport validate_class(const KernelParams& params, std::int64_t nsamples, std::uint64_t seed);
KernelClassReport validate_class(const KernelParams& params, const KernelFunction& kernel, std::int64_t nsamples,
                                 std::uint64_t seed);

AngularMode parse_angular_mode(const std::string& text);
const char* to_string(AngularMode mode);

}  // namespace rwb
