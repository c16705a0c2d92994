#include "rwb/collision.hpp"

#include "rwb/errors.hpp"
#include "rwb/parallel.hpp"
#include "rwb/random.hpp"

#include <algorithm>
#include <cmath>

namespace rwb {

namespace {

constexpr double kMinG = 1e-14;
constexpr double kTinyN2 = 1e-24;

// Density of the importance distribution pi^-3/2 exp(-|u|^2).
double gaussian_density(const Vec3& u) { return std::exp(-norm2(u)) / std::pow(M_PI, 1.5); }

// Draws from pi^-3/2 exp(-|u|^2), i.e. N(0, 1/2) per component.
Vec3 draw_gaussian(Rng& rng) { return M_SQRT1_2 * rng.gaussian3(); }

}  // namespace

RepresentationMode parse_representation_mode(const std::string& text)
{
    if (text == "R" || text == "OmegaR") return RepresentationMode::OmegaR;
    if (text == "RS" || text == "OmegaRS") return RepresentationMode::OmegaRS;
    if (text == "adaptive" || text == "Adaptive") return RepresentationMode::Adaptive;
    throw InvalidArgument("unknown representation '" + text + "' (expected R|RS|adaptive)");
}

const char* to_string(RepresentationMode mode)
{
    switch (mode) {
    case RepresentationMode::OmegaR: return "R";
    case RepresentationMode::OmegaRS: return "RS";
    case RepresentationMode::Adaptive: return "adaptive";
    }
    return "?";
}

Representation select_representation(RepresentationMode mode, const Momentum3& v, const Momentum3& u, double R)
{
    switch (mode) {
    case RepresentationMode::OmegaR: return Representation::OmegaR;
    case RepresentationMode::OmegaRS: return Representation::OmegaRS;
    case RepresentationMode::Adaptive: {
        const double vv = norm2(v);
        if (vv <= R * R) return Representation::OmegaR;        // case 1
        if (vv <= 4.0 * norm2(u)) return Representation::OmegaR;  // case 2
        return Representation::OmegaRS;                            // case 3
    }
    }
    return Representation::OmegaR;
}

void QuadratureSpec::validate() const
{
    if (angular_nodes < 6) throw InvalidArgument("quad.angular_nodes must be at least 6");
    if (u_integration == UIntegration::SubsampledGrid && u_stride < 1) {
        throw InvalidArgument("quad.u_stride must be at least 1");
    }
}

CollisionOperator::CollisionOperator(const DistributionField& field, double R, const KernelParams& kernel,
                                     const QuadratureSpec& quad, RepresentationMode mode)
    : field_(field), R_(R), kernel_(kernel), quad_(quad), mode_(mode)
{
    if (!(R > 0.0)) throw InvalidArgument("collision operator needs R > 0");
    kernel_.validate();
    quad_.validate();
    sphere_ = product_sphere_rule(quad_.angular_nodes);

    const VGrid& grid = field.grid();
    if (quad_.u_integration == UIntegration::ReuseGrid) {
        const int n = grid.n();
        u_.reserve(grid.size());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const Vec3 u = grid.node(i, j, k);
                    u_.push_back({u, lift(u, R), grid.trapezoid_weight(i, j, k), field.at(i, j, k)});
                }
            }
        }
    } else {
        const int m = (grid.n() - 1) / quad_.u_stride + 1;
        if (m < 2) throw InvalidArgument("u_stride leaves fewer than two u points per axis");
        const double h = 2.0 * grid.vmax() / (m - 1);
        auto coord = [&](int i) { return -grid.vmax() + i * h; };
        auto w1 = [&](int i) { return (i == 0 || i == m - 1) ? 0.5 * h : h; };
        u_.reserve(static_cast<std::size_t>(m) * m * m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                for (int k = 0; k < m; ++k) {
                    const Vec3 u{coord(i), coord(j), coord(k)};
                    u_.push_back({u, lift(u, R), w1(i) * w1(j) * w1(k), sample(u)});
                }
            }
        }
    }
}

QValue CollisionOperator::evaluate(const Vec3& v) const { return evaluate(v, sample(v)); }

QValue CollisionOperator::evaluate(const Vec3& v, double f_v) const
{
    const double R = R_;
    const double inv_R2 = 1.0 / (R * R);
    const double v0 = std::sqrt(1.0 + norm2(v) * inv_R2);
    const double vv = norm2(v);
    const bool linear = quad_.interpolation == Interpolation::Linear;
    auto f_at = [&](const Vec3& x) { return linear ? field_.interpolate(x) : field_.interpolate_cubic(x); };

    double gain = 0.0;
    double loss = 0.0;
    for (const UNode& node : u_) {
        const Vec3& u = node.u;
        const double u0 = node.u0;
        const Vec3 d = v - u;
        const Vec3 n = v + u;
        const double n0 = v0 + u0;
        const double dd = norm2(d);
        const double g2 = relative_momentum_squared(v, u, R, v0, u0);
        const double g = std::sqrt(g2);
        if (g < kMinG) continue;
        const double s = 4.0 + g2;
        const double sqrt_s = std::sqrt(s);
        const CollisionScalars sc{v0, u0, g, s, 0.0};
        const double kernel = moller_kernel(kernel_, sc) * node.weight;
        const double nn = norm2(n);
        const double cutoff_scale = dd / (2.0 * R * R * s);  // q = cutoff_scale |n x w|^2

        const bool exact_loss = quad_.loss_rule == LossRule::ExactSolidAngle;
        if (exact_loss && node.f != 0.0 && f_v != 0.0) {
            loss += kernel * f_v * node.f * cutoff_solid_angle(kernel_, cutoff_scale * nn);
        }

        Representation rep = Representation::OmegaR;
        if (mode_ == RepresentationMode::OmegaRS) {
            rep = Representation::OmegaRS;
        } else if (mode_ == RepresentationMode::Adaptive && vv > R * R && vv > 4.0 * norm2(u)) {
            rep = Representation::OmegaRS;
        }
        const Vec3 half_n = 0.5 * n;
        const double rg_half = 0.5 * R * g;
        const double inv_nn = nn < kTinyN2 ? 0.0 : 1.0 / nn;
        const double rs_stretch = n0 / sqrt_s - 1.0;

        double angular = 0.0;
        double measure = 0.0;
        for (const SphereNode& node_w : sphere_) {
            const Vec3& w = node_w.direction.vec();
            const double nw = dot(n, w);
            const double weight = cutoff_weight(kernel_, cutoff_scale * std::max(0.0, nn - nw * nw));
            if (weight == 0.0) continue;
            measure += node_w.weight * weight;
            Vec3 vp;
            if (rep == Representation::OmegaR) {
                const double r = std::sqrt(n0 * n0 - nw * nw * inv_R2);
                vp = half_n + (rg_half * n0 / r) * w;
            } else {
                vp = half_n + rg_half * (w + (rs_stretch * nw * inv_nn) * n);
            }
            const double fv = f_at(vp);
            if (fv == 0.0) continue;
            const double fu = f_at(n - vp);
            angular += node_w.weight * weight * fv * fu;
        }
        gain += kernel * angular;
        if (!exact_loss) loss += kernel * f_v * node.f * measure;
    }
    const double scale = 1.0 / (R * R * R);
    return {gain * scale, loss * scale};
}

QValue q_eval(const DistributionField& field, const Vec3& v, double t, const ScaleFactorSpec& cosmology,
              const KernelParams& kernel, const QuadratureSpec& quad, RepresentationMode mode)
{
    const CollisionOperator op(field, scale_factor(cosmology, t), kernel, quad, mode);
    return op.evaluate(v);
}

SymmetryMode parse_symmetry_mode(const std::string& text)
{
    if (text == "none") return SymmetryMode::None;
    if (text == "octahedral") return SymmetryMode::Octahedral;
    if (text == "auto") return SymmetryMode::Auto;
    throw InvalidArgument("unknown symmetry mode '" + text + "' (expected none|octahedral|auto)");
}

const char* to_string(SymmetryMode mode)
{
    switch (mode) {
    case SymmetryMode::None: return "none";
    case SymmetryMode::Octahedral: return "octahedral";
    case SymmetryMode::Auto: return "auto";
    }
    return "?";
}

namespace {

// Orbit representative of (i, j, k) under reflections i -> n-1-i and axis
// permutations: folded indices sorted ascending.
std::size_t orbit_representative(const VGrid& grid, int i, int j, int k)
{
    const int n = grid.n();
    int a[3] = {std::min(i, n - 1 - i), std::min(j, n - 1 - j), std::min(k, n - 1 - k)};
    std::sort(a, a + 3);
    return grid.index(a[0], a[1], a[2]);
}

}  // namespace

bool is_octahedral_symmetric(const DistributionField& field, double rel_tol)
{
    const VGrid& grid = field.grid();
    const int n = grid.n();
    double peak = 0.0;
    for (double x : field.values()) peak = std::max(peak, std::fabs(x));
    const double tol = rel_tol * peak;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double f = field.at(i, j, k);
                if (std::fabs(f - field.at(n - 1 - i, j, k)) > tol) return false;
                if (std::fabs(f - field.at(j, i, k)) > tol) return false;
                if (std::fabs(f - field.at(i, k, j)) > tol) return false;
            }
        }
    }
    return true;
}

std::vector<double> QField::total() const
{
    std::vector<double> out(gain.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gain[i] - loss[i];
    return out;
}

QField q_field(const DistributionField& field, double t, const ScaleFactorSpec& cosmology, const KernelParams& kernel,
               const QuadratureSpec& quad, RepresentationMode mode, SymmetryMode symmetry)
{
    const VGrid& grid = field.grid();
    const CollisionOperator op(field, scale_factor(cosmology, t), kernel, quad, mode);

    bool use_symmetry = symmetry == SymmetryMode::Octahedral;
    if (symmetry == SymmetryMode::Auto) use_symmetry = is_octahedral_symmetric(field);

    std::vector<std::size_t> targets;
    std::vector<std::size_t> representative(grid.size());
    if (use_symmetry) {
        const int n = grid.n();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const std::size_t idx = grid.index(i, j, k);
                    representative[idx] = orbit_representative(grid, i, j, k);
                    if (representative[idx] == idx) targets.push_back(idx);
                }
            }
        }
    } else {
        targets.resize(grid.size());
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            targets[idx] = idx;
            representative[idx] = idx;
        }
    }

    QField out;
    out.gain.assign(grid.size(), 0.0);
    out.loss.assign(grid.size(), 0.0);
    out.used_symmetry = use_symmetry;
    out.evaluated_nodes = targets.size();
    parallel_for(targets.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t t_idx = begin; t_idx < end; ++t_idx) {
            const std::size_t idx = targets[t_idx];
            const QValue q = op.evaluate(grid.node(idx), field[idx]);
            out.gain[idx] = q.gain;
            out.loss[idx] = q.loss;
        }
    });
    if (use_symmetry) {
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            out.gain[idx] = out.gain[representative[idx]];
            out.loss[idx] = out.loss[representative[idx]];
        }
    }
    return out;
}

McEstimate q_mc(const DistributionField& field, const Vec3& v, double t, const ScaleFactorSpec& cosmology,
                const KernelParams& kernel, const McSpec& mc, RepresentationMode mode)
{
    kernel.validate();
    if (mc.nsamples < 2) throw InvalidArgument("q_mc needs at least two samples");
    const double R = scale_factor(cosmology, t);
    const double f_v = field.interpolate(v);
    Rng rng(mc.seed);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::int64_t i = 0; i < mc.nsamples; ++i) {
        const Vec3 u = draw_gaussian(rng);
        const UnitVector w = rng.unit_vector();
        double x = 0.0;
        const CollisionScalars sc = collision_scalars(v, u, R);
        if (sc.g >= kMinG) {
            const double weight = cutoff_weight(kernel, cutoff_quantity(v, u, w, R));
            if (weight != 0.0) {
                const CollisionOutcome out = post_collision(v, u, w, R, select_representation(mode, v, u, R));
                const double bracket =
                    field.interpolate(out.v_prime) * field.interpolate(out.u_prime) - f_v * field.interpolate(u);
                x = moller_kernel(kernel, sc) * weight * bracket * (4.0 * M_PI) / gaussian_density(u);
            }
        }
        sum += x;
        sum2 += x * x;
    }
    const double nsamp = static_cast<double>(mc.nsamples);
    const double mean = sum / nsamp;
    const double var = std::max(0.0, (sum2 / nsamp - mean * mean) * nsamp / (nsamp - 1.0));
    const double scale = 1.0 / (R * R * R);
    return {mean * scale, std::sqrt(var / nsamp) * scale, mc.nsamples};
}

const char* to_string(CollisionInvariant phi)
{
    switch (phi) {
    case CollisionInvariant::One: return "1";
    case CollisionInvariant::V1: return "v1";
    case CollisionInvariant::V2: return "v2";
    case CollisionInvariant::V3: return "v3";
    case CollisionInvariant::V0: return "v0";
    }
    return "?";
}

namespace {

double invariant_value(CollisionInvariant phi, const Vec3& v, double v0)
{
    switch (phi) {
    case CollisionInvariant::One: return 1.0;
    case CollisionInvariant::V1: return v.x;
    case CollisionInvariant::V2: return v.y;
    case CollisionInvariant::V3: return v.z;
    case CollisionInvariant::V0: return v0;
    }
    return 0.0;
}

}  // namespace

WeakMomentEstimate weak_moment(const DistributionField& field, CollisionInvariant phi, double t,
                               const ScaleFactorSpec& cosmology, const KernelParams& kernel, const McSpec& mc,
                               RepresentationMode mode)
{
    kernel.validate();
    if (mc.nsamples < 2) throw InvalidArgument("weak_moment needs at least two samples");
    const double R = scale_factor(cosmology, t);
    Rng rng(mc.seed);
    WeakMomentEstimate est;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::int64_t i = 0; i < mc.nsamples; ++i) {
        const Vec3 v = draw_gaussian(rng);
        const Vec3 u = draw_gaussian(rng);
        const UnitVector w = rng.unit_vector();
        const CollisionScalars sc = collision_scalars(v, u, R);
        double x = 0.0;
        if (sc.g >= kMinG) {
            const CollisionOutcome out = post_collision(v, u, w, R, select_representation(mode, v, u, R));
            const double bracket = invariant_value(phi, out.v_prime, out.v0_prime) +
                                   invariant_value(phi, out.u_prime, out.u0_prime) -
                                   invariant_value(phi, v, sc.v0) - invariant_value(phi, u, sc.u0);
            est.max_bracket = std::max(est.max_bracket, std::fabs(bracket));
            const double weight = cutoff_weight(kernel, cutoff_quantity(v, u, w, R));
            const double density = gaussian_density(v) * gaussian_density(u) / (4.0 * M_PI);
            x = 0.5 * moller_kernel(kernel, sc) * weight * field.interpolate(v) * field.interpolate(u) * bracket /
                density;
        }
        sum += x;
        sum2 += x * x;
    }
    const double nsamp = static_cast<double>(mc.nsamples);
    const double mean = sum / nsamp;
    const double var = std::max(0.0, (sum2 / nsamp - mean * mean) * nsamp / (nsamp - 1.0));
    const double scale = 1.0 / (R * R * R);
    est.estimate = mean * scale;
    est.stderr_ = std::sqrt(var / nsamp) * scale;
    est.samples = mc.nsamples;
    return est;
}

EntropyProductionEstimate entropy_production_mc(const DistributionField& field, double t,
                                                const ScaleFactorSpec& cosmology, const KernelParams& kernel,
                                                const McSpec& mc, RepresentationMode mode)
{
    kernel.validate();
    if (mc.nsamples < 2) throw InvalidArgument("entropy production needs at least two samples");
    const double R = scale_factor(cosmology, t);
    Rng rng(mc.seed);
    EntropyProductionEstimate est;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::int64_t i = 0; i < mc.nsamples; ++i) {
        const Vec3 v = draw_gaussian(rng);
        const Vec3 u = draw_gaussian(rng);
        const UnitVector w = rng.unit_vector();
        const CollisionScalars sc = collision_scalars(v, u, R);
        double x = 0.0;
        const double fv = field.interpolate(v);
        const double fu = field.interpolate(u);
        if (sc.g >= kMinG && fv > 0.0 && fu > 0.0) {
            const CollisionOutcome out = post_collision(v, u, w, R, select_representation(mode, v, u, R));
            const double fvp = field.interpolate(out.v_prime);
            const double fup = field.interpolate(out.u_prime);
            if (fvp > 0.0 && fup > 0.0) {
                const double weight = cutoff_weight(kernel, cutoff_quantity(v, u, w, R));
                const double density = gaussian_density(v) * gaussian_density(u) / (4.0 * M_PI);
                x = 0.5 * moller_kernel(kernel, sc) * weight * fv * fu * std::log((fv * fu) / (fvp * fup)) / density;
            } else {
                ++est.skipped;
            }
        }
        sum += x;
        sum2 += x * x;
    }
    const double nsamp = static_cast<double>(mc.nsamples);
    const double mean = sum / nsamp;
    const double var = std::max(0.0, (sum2 / nsamp - mean * mean) * nsamp / (nsamp - 1.0));
    const double scale = 1.0 / (R * R * R);
    est.estimate = mean * scale;
    est.stderr_ = std::sqrt(var / nsamp) * scale;
    est.samples = mc.nsamples;
    return est;
}

}  // namespace rwb
