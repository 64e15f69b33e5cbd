#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>

#include <boost/multiprecision/float128.hpp>

namespace atlas {

using quad = boost::multiprecision::float128;

using std::abs;
using std::sqrt;
using boost::multiprecision::abs;
using boost::multiprecision::sqrt;

template <class T>
struct Vec3 {
    T x{0}, y{0}, z{0};

    Vec3() = default;
    Vec3(T a, T b, T c) : x(std::move(a)), y(std::move(b)), z(std::move(c)) {}

    template <class U>
    explicit Vec3(const Vec3<U>& o) : x(static_cast<T>(o.x)), y(static_cast<T>(o.y)), z(static_cast<T>(o.z)) {}

    T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(const T& s) { x *= s; y *= s; z *= s; return *this; }
    Vec3& operator/=(const T& s) { x /= s; y /= s; z /= s; return *this; }

    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator-(const Vec3& a) { return Vec3(-a.x, -a.y, -a.z); }
    friend Vec3 operator*(Vec3 a, const T& s) { return a *= s; }
    friend Vec3 operator*(const T& s, Vec3 a) { return a *= s; }
    friend Vec3 operator/(Vec3 a, const T& s) { return a /= s; }
};

using Vec3d = Vec3<double>;
using Vec3q = Vec3<quad>;

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class T>
T norm(const Vec3<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }

template <class T>
Vec3<T> normalized(const Vec3<T>& a) { return a / norm(a); }

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <class T>
Vec3<T> mul(const Mat3<T>& m, const Vec3<T>& v)
{
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

// Gaussian elimination with partial pivoting. Returns nullopt when a pivot
// falls below rel_tol times the largest matrix entry.
template <class T>
std::optional<Vec3<T>> solve3(Mat3<T> m, Vec3<T> b, double rel_tol = 1e-30)
{
    using std::abs;
    T scale = 0;
    for (auto& row : m)
        for (auto& e : row)
            if (abs(e) > scale) scale = abs(e);
    if (scale == 0) return std::nullopt;
    std::array<T, 3> rhs{b.x, b.y, b.z};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
        if (abs(m[piv][c]) <= T(rel_tol) * scale) return std::nullopt;
        std::swap(m[piv], m[c]);
        std::swap(rhs[piv], rhs[c]);
        for (int r = c + 1; r < 3; ++r) {
            T f = m[r][c] / m[c][c];
            for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    std::array<T, 3> x{};
    for (int r = 2; r >= 0; --r) {
        T s = rhs[r];
        for (int k = r + 1; k < 3; ++k) s -= m[r][k] * x[k];
        x[r] = s / m[r][r];
    }
    return Vec3<T>{x[0], x[1], x[2]};
}

// Eigenvalues (ascending) of the symmetric 2x2 matrix [[a, b], [b, c]].
template <class T>
std::pair<T, T> sym2_eigenvalues(const T& a, const T& b, const T& c)
{
    using std::sqrt;
    T mean = (a + c) / 2;
    T d = (a - c) / 2;
    T rad = sqrt(d * d + b * b);
    return {mean - rad, mean + rad};
}

// Orthonormal pair spanning the plane orthogonal to the unit vector n.
template <class T>
std::pair<Vec3<T>, Vec3<T>> tangent_frame(const Vec3<T>& n)
{
    using std::abs;
    Vec3<T> helper = abs(n.x) < T(0.6) ? Vec3<T>(1, 0, 0) : Vec3<T>(0, 1, 0);
    Vec3<T> e1 = normalized(cross(n, helper));
    Vec3<T> e2 = cross(n, e1);
    return {e1, e2};
}

inline double to_double(const quad& q) { return q.convert_to<double>(); }
inline double to_double(double d) { return d; }

inline Vec3d to_double(const Vec3q& v) { return {to_double(v.x), to_double(v.y), to_double(v.z)}; }
inline Vec3d to_double(const Vec3d& v) { return v; }

template <class T>
constexpr double epsilon_of()
{
    if constexpr (std::is_same_v<T, double>) return 2.220446049250313e-16;
    else return 1.925929944387235853055977942584927e-34;
}

}  // namespace atlas
