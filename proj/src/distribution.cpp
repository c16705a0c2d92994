#include "rwb/distribution.hpp"

#include "rwb/errors.hpp"
#include "rwb/format.hpp"
#include "rwb/kinematics.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace rwb {

VGrid::VGrid(double vmax, int n) : vmax_(vmax), n_(n), h_(0.0)
{
    if (!(vmax > 0.0) || !std::isfinite(vmax)) throw InvalidArgument("grid.vmax must be positive");
    if (n < 8) throw InvalidArgument("grid.n must be at least 8");
    h_ = 2.0 * vmax / (n - 1);
}

Vec3 VGrid::node(std::size_t idx) const
{
    int i = 0;
    int j = 0;
    int k = 0;
    unflatten(idx, i, j, k);
    return node(i, j, k);
}

void VGrid::unflatten(std::size_t idx, int& i, int& j, int& k) const
{
    const auto n = static_cast<std::size_t>(n_);
    k = static_cast<int>(idx % n);
    j = static_cast<int>((idx / n) % n);
    i = static_cast<int>(idx / (n * n));
}

DistributionField::DistributionField(VGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size()) {
        throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid needs " +
                              std::to_string(grid_.size()));
    }
    for (double x : values_) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("distribution values must be finite and >= 0");
    }
}

DistributionField::DistributionField(VGrid grid, std::vector<double> values, Unchecked)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size()) throw InvalidArgument("stage field size does not match grid");
}

DistributionField DistributionField::zeros(const VGrid& grid)
{
    return {grid, std::vector<double>(grid.size(), 0.0)};
}

DistributionField DistributionField::from_function(const VGrid& grid, const std::function<double(const Vec3&)>& f)
{
    std::vector<double> values(grid.size());
    for (std::size_t idx = 0; idx < values.size(); ++idx) values[idx] = f(grid.node(idx));
    return {grid, std::move(values)};
}

DistributionField DistributionField::stage(const VGrid& grid, std::vector<double> values)
{
    return {grid, std::move(values), Unchecked{}};
}

namespace {

// Catmull-Rom weights for offsets -1, 0, 1, 2 at fractional position t.
std::array<double, 4> catmull_rom(double t)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2)};
}

}  // namespace

double DistributionField::interpolate_cubic(const Vec3& v) const
{
    const double vmax = grid_.vmax();
    if (!(std::fabs(v.x) <= vmax && std::fabs(v.y) <= vmax && std::fabs(v.z) <= vmax)) return 0.0;
    const int n = grid_.n();
    const double inv_h = 1.0 / grid_.h();
    int base[3];
    std::array<double, 4> w[3];
    for (int a = 0; a < 3; ++a) {
        double f = (v[a] + vmax) * inv_h;
        int i = std::min(static_cast<int>(f), n - 2);
        base[a] = i - 1;
        w[a] = catmull_rom(f - i);
    }
    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int i = base[0] + a;
        if (i < 0 || i >= n) continue;
        for (int b = 0; b < 4; ++b) {
            const int j = base[1] + b;
            if (j < 0 || j >= n) continue;
            const double wij = w[0][a] * w[1][b];
            const double* row = values_.data() + grid_.index(i, j, 0);
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) {
                const int k = base[2] + c;
                if (k < 0 || k >= n) continue;
                acc += w[2][c] * row[k];
            }
            total += wij * acc;
        }
    }
    return total;
}

double weighted_norm(const DistributionField& field)
{
    const VGrid& grid = field.grid();
    const int n = grid.n();
    const double h = grid.h();
    double best = 0.0;
    auto derivative = [&](int i, int j, int k, int axis) {
        int idx[3] = {i, j, k};
        const int c = idx[axis];
        int lo = c - 1;
        int hi = c + 1;
        if (lo < 0) lo = c;
        if (hi >= n) hi = c;
        int a[3] = {i, j, k};
        int b[3] = {i, j, k};
        a[axis] = hi;
        b[axis] = lo;
        return (field.at(a[0], a[1], a[2]) - field.at(b[0], b[1], b[2])) / ((hi - lo) * h);
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double weight = std::exp(norm2(grid.node(i, j, k)));
                double local = std::fabs(field.at(i, j, k));
                for (int axis = 0; axis < 3; ++axis) local = std::max(local, std::fabs(derivative(i, j, k, axis)));
                best = std::max(best, weight * local);
            }
        }
    }
    return best;
}

double decay_certificate(const DistributionField& field)
{
    const VGrid& grid = field.grid();
    double best = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        best = std::max(best, std::exp(norm2(grid.node(idx))) * field[idx]);
    }
    return best;
}

Moments moments(const DistributionField& field, double R)
{
    const VGrid& grid = field.grid();
    const int n = grid.n();
    Moments m;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double f = field.at(i, j, k) * grid.trapezoid_weight(i, j, k);
                if (f == 0.0) continue;
                const Vec3 v = grid.node(i, j, k);
                m.mass += f;
                m.momentum += f * v;
                m.energy += f * lift(v, R);
            }
        }
    }
    return m;
}

DistributionField equilibrium(const EquilibriumParams& params, double R, const VGrid& grid)
{
    if (!(R > 0.0)) throw InvalidArgument("equilibrium: R must be positive");
    if (!(params.gamma > 0.0) || !(params.gamma > R * norm(params.beta))) {
        throw InvalidArgument("equilibrium parameters unbounded: need gamma > R |beta|");
    }
    return DistributionField::from_function(grid, [&](const Vec3& v) {
        return std::exp(params.alpha + dot(params.beta, v) - params.gamma * lift(v, R));
    });
}

DistributionField gaussian_initial_data(double eps, double width, const VGrid& grid)
{
    if (!(width > 1.0)) throw InvalidArgument("gaussian initial data needs width > 1");
    if (!(eps >= 0.0)) throw InvalidArgument("gaussian initial data needs eps >= 0");
    return DistributionField::from_function(grid, [&](const Vec3& v) { return eps * std::exp(-width * norm2(v)); });
}

void write_snapshot_csv(std::ostream& os, double t, const DistributionField& field, int stride)
{
    if (stride < 1) throw InvalidArgument("snapshot stride must be >= 1");
    const VGrid& grid = field.grid();
    const int n = grid.n();
    os << "t,v1,v2,v3,f\n";
    const std::string ts = format_double(t);
    for (int i = 0; i < n; i += stride) {
        for (int j = 0; j < n; j += stride) {
            for (int k = 0; k < n; k += stride) {
                os << ts << ',' << format_double(grid.coord(i)) << ',' << format_double(grid.coord(j)) << ','
                   << format_double(grid.coord(k)) << ',' << format_double(field.at(i, j, k)) << '\n';
            }
        }
    }
}

Snapshot read_snapshot_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open snapshot '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,v1,v2,v3,f", 0) != 0) {
        throw InvalidArgument("snapshot '" + path + "' lacks the t,v1,v2,v3,f header");
    }
    double t = 0.0;
    double vmin = 0.0;
    double vmax = 0.0;
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::array<double, 5> cols{};
        char comma = 0;
        row >> cols[0];
        for (int c = 1; c < 5; ++c) row >> comma >> cols[c];
        if (!row) throw InvalidArgument("malformed snapshot row " + std::to_string(rows + 2) + " in '" + path + "'");
        if (rows == 0) {
            t = cols[0];
            vmin = cols[1];
        }
        vmax = std::max(vmax, cols[1]);
        values.push_back(cols[4]);
        ++rows;
    }
    const int n = static_cast<int>(std::lround(std::cbrt(static_cast<double>(rows))));
    if (static_cast<std::size_t>(n) * n * n != rows) {
        throw InvalidArgument("snapshot '" + path + "' does not hold a full cubic grid");
    }
    if (std::fabs(vmin + vmax) > 1e-9 * vmax) throw InvalidArgument("snapshot grid is not centered");
    return {t, DistributionField(VGrid(vmax, n), std::move(values))};
}

Interpolation parse_interpolation(const std::string& text)
{
    if (text == "linear") return Interpolation::Linear;
    if (text == "cubic") return Interpolation::Cubic;
    throw InvalidArgument("unknown interpolation '" + text + "' (expected linear|cubic)");
}

const char* to_string(Interpolation order) { return order == Interpolation::Linear ? "linear" : "cubic"; }

}  // namespace rwb
