#pragma once

#include "rwb/vec3.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rwb {

/// Uniform n^3 grid on the cube [-vmax, vmax]^3.
class VGrid {
public:
    VGrid(double vmax, int n);

    double vmax() const { return vmax_; }
    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    double coord(int i) const { return -vmax_ + i * h_; }
    std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n_ + j) * n_ + k; }
    Vec3 node(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }
    Vec3 node(std::size_t idx) const;
    void unflatten(std::size_t idx, int& i, int& j, int& k) const;

    /// 1D trapezoid weight of index i (h, halved on the two faces).
    double trapezoid_weight_1d(int i) const { return (i == 0 || i == n_ - 1) ? 0.5 * h_ : h_; }
    double trapezoid_weight(int i, int j, int k) const
    {
        return trapezoid_weight_1d(i) * trapezoid_weight_1d(j) * trapezoid_weight_1d(k);
    }

    friend bool operator==(const VGrid&, const VGrid&) = default;

private:
    double vmax_;
    int n_;
    double h_;
};

enum class Interpolation { Linear, Cubic };

/// Samples of f(t, .) on a VGrid. Public construction enforces f >= 0 and
/// finiteness; `stage` builds the signed intermediate states of a
/// Runge-Kutta step without those checks.
class DistributionField {
public:
    DistributionField(VGrid grid, std::vector<double> values);

    static DistributionField zeros(const VGrid& grid);
    static DistributionField from_function(const VGrid& grid, const std::function<double(const Vec3&)>& f);
    static DistributionField stage(const VGrid& grid, std::vector<double> values);

    const VGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double at(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }
    double operator[](std::size_t idx) const { return values_[idx]; }

    /// Trilinear interpolation; 0 outside the cube, exact at nodes.
    double interpolate(const Vec3& v) const
    {
        const double vmax = grid_.vmax();
        if (!(std::fabs(v.x) <= vmax && std::fabs(v.y) <= vmax && std::fabs(v.z) <= vmax)) return 0.0;
        const int last = grid_.n() - 2;
        const double inv_h = 1.0 / grid_.h();
        double fx = (v.x + vmax) * inv_h;
        double fy = (v.y + vmax) * inv_h;
        double fz = (v.z + vmax) * inv_h;
        int i = std::min(static_cast<int>(fx), last);
        int j = std::min(static_cast<int>(fy), last);
        int k = std::min(static_cast<int>(fz), last);
        fx -= i;
        fy -= j;
        fz -= k;
        const int n = grid_.n();
        const double* p = values_.data() + grid_.index(i, j, k);
        const std::size_t sj = static_cast<std::size_t>(n);
        const std::size_t si = sj * n;
        const double c00 = p[0] + fz * (p[1] - p[0]);
        const double c01 = p[sj] + fz * (p[sj + 1] - p[sj]);
        const double c10 = p[si] + fz * (p[si + 1] - p[si]);
        const double c11 = p[si + sj] + fz * (p[si + sj + 1] - p[si + sj]);
        const double c0 = c00 + fy * (c01 - c00);
        const double c1 = c10 + fy * (c11 - c10);
        return c0 + fx * (c1 - c0);
    }

    /// Tricubic Catmull-Rom interpolation with f = 0 beyond the cube. Exact
    /// at nodes and for quadratics away from the faces. May undershoot below
    /// zero near steep features.
    double interpolate_cubic(const Vec3& v) const;

    double interpolate(const Vec3& v, Interpolation order) const
    {
        return order == Interpolation::Linear ? interpolate(v) : interpolate_cubic(v);
    }

private:
    struct Unchecked {};
    DistributionField(VGrid grid, std::vector<double> values, Unchecked);

    VGrid grid_;
    std::vector<double> values_;
};

/// max over nodes, j in {0,1}, k in {1,2,3} of |e^{|v|^2} D^j_k f|, with D
/// a central difference (one-sided on the faces).
double weighted_norm(const DistributionField& field);

/// max over nodes of e^{|v|^2} f, the j = 0 part of the weighted norm.
double decay_certificate(const DistributionField& field);

struct Moments {
    double mass = 0.0;
    Vec3 momentum;
    double energy = 0.0;
};

/// Trapezoid integrals of f, v f and v0(R) f.
Moments moments(const DistributionField& field, double R);

struct EquilibriumParams {
    double alpha = 0.0;
    Vec3 beta;
    double gamma = 1.0;
};

/// Nodewise exp(alpha + beta.v - gamma v0(R)). Requires gamma > R |beta|,
/// which keeps the profile bounded since v0 >= |v| / R.
DistributionField equilibrium(const EquilibriumParams& params, double R, const VGrid& grid);

/// eps exp(-width |v|^2) with width > 1 so that e^{|v|^2} f0 decays.
DistributionField gaussian_initial_data(double eps, double width, const VGrid& grid);

/// CSV snapshot with header t,v1,v2,v3,f. `stride` keeps every stride-th
/// node along each axis.
void write_snapshot_csv(std::ostream& os, double t, const DistributionField& field, int stride = 1);

struct Snapshot {
    double t = 0.0;
    DistributionField field;
};

/// Reads an undecimated snapshot written by write_snapshot_csv. The grid is
/// recovered from the node coordinates.
Snapshot read_snapshot_csv(const std::string& path);

Interpolation parse_interpolation(const std::string& text);
const char* to_string(Interpolation order);

}  // namespace rwb
