#include "rwb/kernels.hpp"

#include "rwb/errors.hpp"
#include "rwb/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rwb {

void KernelParams::validate() const
{
    if (!(A > 0.0)) throw InvalidArgument("kernel.A must be positive");
    if (!(b >= 0.0 && b < 3.0)) throw InvalidArgument("kernel.b must lie in [0, 3)");
    if (!(sigma1 > 0.0)) throw InvalidArgument("kernel.sigma1 must be positive");
    if (!(B > 0.0)) throw InvalidArgument("kernel.B must be positive");
    if (angular_mode == AngularMode::SmoothCutoff && !(smooth_width > 0.0)) {
        throw InvalidArgument("kernel.smooth_width must be positive");
    }
}

double KernelParams::derivative_constant() const { return A * std::max(1.0, b); }

double cutoff_weight(const KernelParams& params, double q)
{
    if (params.angular_mode == AngularMode::SharpCutoff) {
        return q <= params.B ? 1.0 : 0.0;
    }
    if (q >= params.B) return 0.0;
    const double start = params.B - params.smooth_width;
    if (q <= start) return 1.0;
    const double x = (q - start) / params.smooth_width;
    return 1.0 - x * x * (3.0 - 2.0 * x);
}

double cutoff_solid_angle(const KernelParams& params, double kappa)
{
    constexpr double four_pi = 4.0 * M_PI;
    if (kappa <= 0.0) return four_pi * cutoff_weight(params, 0.0);

    // q = kappa (1 - mu^2), mu = cos theta; the integrand is even in mu.
    auto mu_at = [kappa](double q) { return std::sqrt(std::clamp(1.0 - q / kappa, 0.0, 1.0)); };
    const double mu_zero = mu_at(params.B);  // weight vanishes for mu < mu_zero
    if (params.angular_mode == AngularMode::SharpCutoff) {
        return four_pi * (1.0 - mu_zero);
    }
    const double start = params.B - params.smooth_width;
    const double mu_full = start > 0.0 ? mu_at(start) : 1.0;  // weight is 1 for mu > mu_full

    // On [mu_zero, mu_full] the weight is a degree-6 polynomial in mu, so a
    // 4-point Gauss-Legendre rule is exact.
    static constexpr std::array<double, 4> x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
    static constexpr std::array<double, 4> w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};
    const double half = 0.5 * (mu_full - mu_zero);
    const double mid = 0.5 * (mu_full + mu_zero);
    double ramp = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double mu = mid + half * x[i];
        ramp += w[i] * cutoff_weight(params, kappa * (1.0 - mu * mu));
    }
    ramp *= half;
    return four_pi * ((1.0 - mu_full) + ramp);
}

double sigma(const KernelParams& params, double g, double weight)
{
    if (!(g >= 0.0)) throw InvalidArgument("sigma: g must be nonnegative");
    if (weight == 0.0) return 0.0;
    const double singular = params.b == 0.0 ? 1.0 : std::pow(g, -params.b);
    return params.A * (1.0 + singular) * params.sigma1 * weight;
}

double sigma(const KernelParams& params, double g, bool cutoff_member)
{
    return sigma(params, g, cutoff_member ? 1.0 : 0.0);
}

double dsigma_dg(const KernelParams& params, double g, double weight)
{
    if (!(g > 0.0)) throw InvalidArgument("dsigma_dg: g must be positive");
    if (params.b == 0.0) return 0.0;
    return -params.A * params.b * std::pow(g, -params.b - 1.0) * params.sigma1 * weight;
}

double moller_kernel(const KernelParams& params, const CollisionScalars& sc)
{
    const double g_part = params.b == 0.0 ? 2.0 * sc.g : sc.g + std::pow(sc.g, 1.0 - params.b);
    return params.A * params.sigma1 * std::sqrt(sc.s) * g_part / (sc.v0 * sc.u0);
}

KernelClassReport validate_class(const KernelParams& params, std::int64_t nsamples, std::uint64_t seed)
{
    const KernelFunction reference = [&params](double g, double weight) {
        return KernelEvaluation{sigma(params, g, weight), dsigma_dg(params, g, weight)};
    };
    return validate_class(params, reference, nsamples, seed);
}

KernelClassReport validate_class(const KernelParams& params, const KernelFunction& kernel, std::int64_t nsamples,
                                 std::uint64_t seed)
{
    params.validate();
    Rng rng(seed);
    KernelClassReport report;
    const double a_prime = params.derivative_constant();
    static constexpr std::array<double, 4> scales{1.0, 2.0, 10.0, 1e3};
    for (std::int64_t i = 0; i < nsamples; ++i) {
        const double g = std::pow(10.0, rng.uniform(-6.0, 3.0));
        const Momentum3 v = rng.gaussian3();
        const Momentum3 u = rng.gaussian3();
        const UnitVector w = rng.unit_vector();
        const double R = scales[static_cast<std::size_t>(i) % scales.size()];
        const double q = cutoff_quantity(v, u, w, R);
        const double weight = cutoff_weight(params, q);
        const double sigma0 = params.sigma1 * weight;
        const double indicator = q <= params.B ? 1.0 : 0.0;

        const KernelEvaluation k = kernel(g, weight);
        const double scale = 1.0 + std::fabs(k.value);
        const double value_slack = std::max(-k.value, k.value - params.A * (1.0 + std::pow(g, -params.b)) * sigma0);
        const double deriv_slack = std::fabs(k.dg) - a_prime * std::pow(g, -params.b - 1.0) * sigma0;
        const double support_slack = sigma0 - params.sigma1 * indicator;

        ++report.samples;
        const double tol = 1e-12 * scale;
        if (value_slack > tol || deriv_slack > 1e-12 * (1.0 + std::fabs(k.dg)) || support_slack > 1e-15) {
            ++report.violations;
        }
        report.max_value_slack = std::max(report.max_value_slack, value_slack / scale);
        report.max_derivative_slack = std::max(report.max_derivative_slack, deriv_slack / (1.0 + std::fabs(k.dg)));
        report.max_support_slack = std::max(report.max_support_slack, support_slack);
    }
    report.passed = report.violations == 0;
    return report;
}

AngularMode parse_angular_mode(const std::string& text)
{
    if (text == "sharp") return AngularMode::SharpCutoff;
    if (text == "smooth") return AngularMode::SmoothCutoff;
    throw InvalidArgument("unknown angular mode '" + text + "' (expected sharp|smooth)");
}

const char* to_string(AngularMode mode) { return mode == AngularMode::SharpCutoff ? "sharp" : "smooth"; }

}  // namespace rwb
