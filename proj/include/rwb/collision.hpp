#pragma once

#include "rwb/cosmology.hpp"
#include "rwb/distribution.hpp"
#include "rwb/kernels.hpp"
#include "rwb/kinematics.hpp"
#include "rwb/quadrature.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rwb {

/// Which post-collisional map the operator integrates with. Adaptive uses
/// OmegaR for |v| <= R or |v| <= 2|u| and OmegaRS otherwise, mirroring the
/// three-case split of the integration domain.
enum class RepresentationMode { OmegaR, OmegaRS, Adaptive };

RepresentationMode parse_representation_mode(const std::string& text);
const char* to_string(RepresentationMode mode);

/// Representation used for the pair (v, u) at scale factor R.
Representation select_representation(RepresentationMode mode, const Momentum3& v, const Momentum3& u, double R);

enum class UIntegration { ReuseGrid, SubsampledGrid };

/// Angular measure of the loss term: the exact solid angle of the cutoff
/// weight, or the same sphere rule as the gain term (then the two terms
/// cancel node by node when f(v') f(u') = f(v) f(u)).
enum class LossRule { ExactSolidAngle, SphereRule };

struct QuadratureSpec {
    int angular_nodes = 12;  // per axis of the product rule; angular_nodes^2 directions
    UIntegration u_integration = UIntegration::ReuseGrid;
    int u_stride = 2;  // SubsampledGrid only: (n-1)/stride + 1 points per axis
    Interpolation interpolation = Interpolation::Linear;
    LossRule loss_rule = LossRule::SphereRule;

    void validate() const;
};

struct McSpec {
    std::int64_t nsamples = 100000;
    std::uint64_t seed = 1;
};

struct QValue {
    double gain = 0.0;
    double loss = 0.0;
    double total() const { return gain - loss; }
};

/// Deterministic quadrature of R^-3 int int v_phi sigma (f(v') f(u') - f(v) f(u)) dw du
/// for one field snapshot at one scale factor. The gain term uses the
/// product sphere rule with the cutoff weight evaluated at each node; the
/// loss term follows QuadratureSpec::loss_rule.
class CollisionOperator {
public:
    CollisionOperator(const DistributionField& field, double R, const KernelParams& kernel,
                      const QuadratureSpec& quad, RepresentationMode mode);

    QValue evaluate(const Vec3& v) const;
    /// Same as evaluate(v) with f(v) supplied (the nodal value on the grid).
    QValue evaluate(const Vec3& v, double f_v) const;

    double scale_factor() const { return R_; }
    std::size_t u_nodes() const { return u_.size(); }
    std::size_t angular_nodes() const { return sphere_.size(); }

private:
    struct UNode {
        Vec3 u;
        double u0 = 1.0;
        double weight = 0.0;  // trapezoid weight
        double f = 0.0;
    };

    double sample(const Vec3& v) const { return field_.interpolate(v, quad_.interpolation); }

    const DistributionField& field_;
    double R_;
    KernelParams kernel_;
    QuadratureSpec quad_;
    RepresentationMode mode_;
    std::vector<SphereNode> sphere_;
    std::vector<UNode> u_;
};

QValue q_eval(const DistributionField& field, const Vec3& v, double t, const ScaleFactorSpec& cosmology,
              const KernelParams& kernel, const QuadratureSpec& quad, RepresentationMode mode);

enum class SymmetryMode { None, Octahedral, Auto };

SymmetryMode parse_symmetry_mode(const std::string& text);
const char* to_string(SymmetryMode mode);

/// True when the field is invariant under the 48 signed axis permutations of
/// the grid (to rel_tol of its max).
bool is_octahedral_symmetric(const DistributionField& field, double rel_tol = 1e-12);

struct QField {
    std::vector<double> gain;
    std::vector<double> loss;
    std::size_t evaluated_nodes = 0;  // nodes where the quadrature actually ran
    bool used_symmetry = false;

    std::vector<double> total() const;
};

/// q_eval at every grid node, in parallel over nodes. Each node's sums run
/// in a fixed order, so the output does not depend on the worker count.
/// With Octahedral (or Auto on a symmetric field) the quadrature runs once
/// per orbit of the signed axis permutations and the value is copied to the
/// rest of the orbit.
QField q_field(const DistributionField& field, double t, const ScaleFactorSpec& cosmology, const KernelParams& kernel,
               const QuadratureSpec& quad, RepresentationMode mode, SymmetryMode symmetry = SymmetryMode::None);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
};

/// Monte Carlo oracle for Q(v): u drawn from pi^-3/2 exp(-|u|^2), directions
/// uniform on S^2. Bit-identical for a fixed seed.
McEstimate q_mc(const DistributionField& field, const Vec3& v, double t, const ScaleFactorSpec& cosmology,
                const KernelParams& kernel, const McSpec& mc, RepresentationMode mode);

enum class CollisionInvariant { One, V1, V2, V3, V0 };

const char* to_string(CollisionInvariant phi);

struct WeakMomentEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double max_bracket = 0.0;  // max |phi(v') + phi(u') - phi(v) - phi(u)| over samples
    std::int64_t samples = 0;
};

/// Symmetrized estimate of int Q(f,f) phi dv,
///   (1/2) R^-3 < v_phi sigma f(v) f(u) (phi(v') + phi(u') - phi(v) - phi(u)) >,
/// with v and u drawn from pi^-3/2 exp(-|.|^2).
WeakMomentEstimate weak_moment(const DistributionField& field, CollisionInvariant phi, double t,
                               const ScaleFactorSpec& cosmology, const KernelParams& kernel, const McSpec& mc,
                               RepresentationMode mode = RepresentationMode::OmegaR);

struct EntropyProductionEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
    std::int64_t skipped = 0;  // post-collisional momenta left the cube
};

/// -int Q(f,f) ln f dv via the half-symmetrized form
///   (1/2) R^-3 < v_phi sigma f(v) f(u) ln(f(v) f(u) / (f(v') f(u'))) >.
/// Requires a strictly positive field; samples whose outcome leaves the cube
/// are skipped and counted.
EntropyProductionEstimate entropy_production_mc(const DistributionField& field, double t,
                                                const ScaleFactorSpec& cosmology, const KernelParams& kernel,
                                                const McSpec& mc, RepresentationMode mode = RepresentationMode::OmegaR);

}  // namespace rwb
