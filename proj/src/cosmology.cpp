#include "rwb/cosmology.hpp"

#include "rwb/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

namespace rwb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kHorizon = 1e6;

class Quadrature {
public:
    Quadrature() : ws_(gsl_integration_workspace_alloc(kLimit), &gsl_integration_workspace_free) {}

    double integrate(const std::function<double(double)>& f, double a, double b)
    {
        if (b <= a) return 0.0;
        gsl_function F;
        F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
        F.params = const_cast<std::function<double(double)>*>(&f);
        double result = 0.0;
        double abserr = 0.0;
        gsl_error_handler_t* old = gsl_set_error_handler_off();
        gsl_integration_qag(&F, a, b, 0.0, 1e-12, kLimit, GSL_INTEG_GAUSS61, ws_.get(), &result, &abserr);
        gsl_set_error_handler(old);
        return result;
    }

private:
    static constexpr std::size_t kLimit = 2000;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws_;
};

// Integrates over [0, t] split at decades so the quadrature sees each scale.
double integrate_by_decades(Quadrature& quad, const std::function<double(double)>& f, double t)
{
    double total = 0.0;
    double lo = 0.0;
    double hi = std::fmin(1.0, t);
    while (lo < t) {
        total += quad.integrate(f, lo, hi);
        lo = hi;
        hi = std::fmin(hi * 10.0, t);
    }
    return total;
}

double power_tail(double c, double p, double T)
{
    if (p <= 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(1.0 + c * T, 1.0 - p) / (c * (p - 1.0));
}

}  // namespace

void validate(const ScaleFactorSpec& spec)
{
    std::visit(overloaded{
                   [](const EinsteinDeSitter& s) {
                       if (!(s.c > 0.0)) throw InvalidArgument("cosmology.c must be positive");
                   },
                   [](const DeSitter& s) {
                       if (!(s.H > 0.0)) throw InvalidArgument("cosmology.H must be positive");
                   },
                   [](const PowerLaw& s) {
                       if (!(s.c > 0.0)) throw InvalidArgument("cosmology.c must be positive");
                       if (!(s.q > 0.0)) throw InvalidArgument("cosmology.q must be positive");
                   },
               },
               spec);
}

std::string describe(const ScaleFactorSpec& spec)
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const EinsteinDeSitter& s) { os << "EinsteinDeSitter(c=" << s.c << ")"; },
                   [&](const DeSitter& s) { os << "DeSitter(H=" << s.H << ")"; },
                   [&](const PowerLaw& s) { os << "PowerLaw(c=" << s.c << ", q=" << s.q << ")"; },
               },
               spec);
    return os.str();
}

double scale_factor(const ScaleFactorSpec& spec, double t)
{
    if (!(t >= 0.0)) throw InvalidArgument("scale factor requested at negative time");
    return std::visit(overloaded{
                          [t](const EinsteinDeSitter& s) { return std::pow(1.0 + s.c * t, 2.0 / 3.0); },
                          [t](const DeSitter& s) { return std::exp(s.H * t); },
                          [t](const PowerLaw& s) { return std::pow(1.0 + s.c * t, s.q); },
                      },
                      spec);
}

double scale_factor_rate(const ScaleFactorSpec& spec, double t)
{
    if (!(t >= 0.0)) throw InvalidArgument("scale factor rate requested at negative time");
    return std::visit(overloaded{
                          [t](const EinsteinDeSitter& s) {
                              return (2.0 / 3.0) * s.c * std::pow(1.0 + s.c * t, -1.0 / 3.0);
                          },
                          [t](const DeSitter& s) { return s.H * std::exp(s.H * t); },
                          [t](const PowerLaw& s) { return s.q * s.c * std::pow(1.0 + s.c * t, s.q - 1.0); },
                      },
                      spec);
}

double collision_budget(const ScaleFactorSpec& spec, double b, double t)
{
    if (!(t >= 0.0)) throw InvalidArgument("budget requested at negative time");
    if (t == 0.0) return 0.0;
    Quadrature quad;
    const auto integrand = [&spec, b](double s) {
        const double R = scale_factor(spec, s);
        return std::pow(R, -3.0) + std::pow(R, b - 4.0);
    };
    return integrate_by_decades(quad, integrand, t);
}

IntegrabilityReport integrability(const ScaleFactorSpec& spec, double b)
{
    validate(spec);
    if (!(b >= 0.0 && b < 3.0)) throw InvalidArgument("b must lie in [0, 3)");

    IntegrabilityReport rep;
    rep.horizon = kHorizon;
    std::visit(overloaded{
                   [&](const DeSitter& s) {
                       rep.exponential = true;
                       rep.exponent_cubic = -3.0 * s.H;
                       rep.exponent_soft = (b - 4.0) * s.H;
                       rep.converges = true;
                       rep.tail_bound = std::exp(-3.0 * s.H * kHorizon) / (3.0 * s.H) +
                                        std::exp((b - 4.0) * s.H * kHorizon) / ((4.0 - b) * s.H);
                   },
                   [&](const EinsteinDeSitter& s) {
                       const double q = 2.0 / 3.0;
                       rep.exponent_cubic = -3.0 * q;
                       rep.exponent_soft = (b - 4.0) * q;
                       rep.converges = rep.exponent_cubic < -1.0 && rep.exponent_soft < -1.0;
                       rep.tail_bound = power_tail(s.c, 3.0 * q, kHorizon) + power_tail(s.c, (4.0 - b) * q, kHorizon);
                   },
                   [&](const PowerLaw& s) {
                       rep.exponent_cubic = -3.0 * s.q;
                       rep.exponent_soft = (b - 4.0) * s.q;
                       rep.converges = rep.exponent_cubic < -1.0 && rep.exponent_soft < -1.0;
                       rep.tail_bound =
                           power_tail(s.c, 3.0 * s.q, kHorizon) + power_tail(s.c, (4.0 - b) * s.q, kHorizon);
                   },
               },
               spec);

    Quadrature quad;
    const auto integrand = [&spec, b](double s) {
        const double R = scale_factor(spec, s);
        return std::pow(R, -3.0) + std::pow(R, b - 4.0);
    };
    const double i4 = integrate_by_decades(quad, integrand, kHorizon / 100.0);
    const double d5 = quad.integrate(integrand, kHorizon / 100.0, kHorizon / 10.0);
    const double d6 = quad.integrate(integrand, kHorizon / 10.0, kHorizon);
    rep.integral_to_horizon = i4 + d5 + d6;

    // For an integrand ~ t^-p the increments over consecutive decades grow
    // by 10^(1-p); the integral converges iff that ratio is below one.
    const double total = rep.integral_to_horizon;
    if (d5 <= 1e-15 * total) {
        rep.decade_ratio = 0.0;
    } else {
        rep.decade_ratio = d6 / d5;
    }
    rep.numeric_converges = rep.decade_ratio < 1.0;
    return rep;
}

}  // namespace rwb
