#include "rwb/quadrature.hpp"

#include "rwb/errors.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace rwb {

GaussLegendreRule gauss_legendre(int n)
{
    if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)), &gsl_integration_glfixed_table_free);
    if (!table) throw InternalError("GSL could not build a Gauss-Legendre table");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &rule.nodes[i], &rule.weights[i],
                                      table.get());
    }
    return rule;
}

std::vector<SphereNode> product_sphere_rule(int m)
{
    if (m < 1) throw InvalidArgument("sphere rule needs at least one node per axis");
    const GaussLegendreRule gl = gauss_legendre(m);
    const double dphi = 2.0 * M_PI / m;
    std::vector<SphereNode> rule;
    rule.reserve(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a) {
        const double mu = gl.nodes[a];
        const double sin_theta = std::sqrt(std::fmax(0.0, 1.0 - mu * mu));
        for (int b = 0; b < m; ++b) {
            const double phi = (b + 0.5) * dphi;
            const Vec3 w{sin_theta * std::cos(phi), sin_theta * std::sin(phi), mu};
            rule.push_back({UnitVector::normalized(w), gl.weights[a] * dphi});
        }
    }
    return rule;
}

}  // namespace rwb
