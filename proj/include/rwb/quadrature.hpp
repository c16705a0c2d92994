#pragma once

#include "rwb/vec3.hpp"

#include <vector>

namespace rwb {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;  // sum to 2
};

GaussLegendreRule gauss_legendre(int n);

struct SphereNode {
    UnitVector direction;
    double weight = 0.0;
};

/// Product rule on S^2: Gauss-Legendre in cos(theta) times m uniformly spaced
/// azimuths (offset by half a step). m^2 nodes, weights sum to 4 pi.
std::vector<SphereNode> product_sphere_rule(int m);

}  // namespace rwb
