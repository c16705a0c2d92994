#pragma once

#include <string>
#include <variant>

namespace rwb {

/// R(t) = (1 + c t)^(2/3); the matter-dominated expansion shifted so R(0) = 1.
struct EinsteinDeSitter {
    double c = 1.0;
};

/// R(t) = exp(H t).
struct DeSitter {
    double H = 1.0;
};

/// R(t) = (1 + c t)^q.
struct PowerLaw {
    double c = 1.0;
    double q = 1.0;
};

using ScaleFactorSpec = std::variant<EinsteinDeSitter, DeSitter, PowerLaw>;

void validate(const ScaleFactorSpec& spec);
std::string describe(const ScaleFactorSpec& spec);

double scale_factor(const ScaleFactorSpec& spec, double t);
double scale_factor_rate(const ScaleFactorSpec& spec, double t);

/// int_0^t R^-3 + R^(b-4) ds, the quantity that multiplies ||f||^2 in the
/// a priori estimate.
double collision_budget(const ScaleFactorSpec& spec, double b, double t);

struct IntegrabilityReport {
    bool converges = false;          // analytic verdict
    bool numeric_converges = false;  // verdict from the quadrature study alone
    // Asymptotic decay of R^-3 and R^(b-4) in t: power-law exponents for the
    // power-law families, exponential rates (negative) for de Sitter.
    bool exponential = false;
    double exponent_cubic = 0.0;
    double exponent_soft = 0.0;
    double integral_to_horizon = 0.0;  // int_0^T with T = horizon
    double horizon = 0.0;
    double tail_bound = 0.0;           // analytic bound on int_T^inf, +inf when divergent
    double decade_ratio = 0.0;         // growth of the integral over the last decade vs the one before
};

/// Analytic verdict for int_0^inf R^-3 + R^(b-4) dt < inf together with an
/// independent numeric estimate (adaptive quadrature to T = 1e6 and a decade
/// growth ratio).
IntegrabilityReport integrability(const ScaleFactorSpec& spec, double b);

}  // namespace rwb
