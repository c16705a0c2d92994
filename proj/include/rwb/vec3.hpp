#pragma once

#include <array>
#include <cmath>

namespace rwb {

/// Plain Euclidean 3-vector. Used for the transformed momentum v = R^2 p and
/// for directions on the unit sphere.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double max_abs(const Vec3& a) { return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z))); }

using Momentum3 = Vec3;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// A direction on S^2. Construction checks |w| = 1 to 1e-12; use
/// `normalized` to project an arbitrary nonzero vector.
class UnitVector {
public:
    UnitVector() = default;
    explicit UnitVector(const Vec3& w);

    static UnitVector normalized(const Vec3& w);

    const Vec3& vec() const { return w_; }
    double operator[](int i) const { return w_[i]; }
    operator const Vec3&() const { return w_; }

private:
    struct Unchecked {};
    UnitVector(const Vec3& w, Unchecked) : w_(w) {}

    Vec3 w_{0.0, 0.0, 1.0};
};

}  // namespace rwb
