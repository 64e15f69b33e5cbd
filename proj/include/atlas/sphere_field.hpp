#pragma once

#include <optional>
#include <string>

#include "atlas/numeric.hpp"
#include "atlas/poly.hpp"

namespace atlas {

enum class Kind { min, max, saddle, degenerate };

std::string to_string(Kind k);

struct Tolerances {
    double grad_tol_base = 1e-8;  // scaled by (1 + max|coef|)
    double hess_tol = 1e-8;
    double newton_tol = 1e-12;
    double dedup_tol = 1e-6;
    double vertex_tol = 1e-9;
    double lambda_cluster_tol = 1e-5;
};

// Both scalar flavours of f, built once per polynomial.
struct FieldPair {
    Polynomial poly;
    PolyField<double> d;
    PolyField<quad> q;
    double coef_scale = 1;  // max |coefficient|

    explicit FieldPair(const Polynomial& p);
};

template <class T>
Vec3<T> tangential(const Vec3<T>& v, const Vec3<T>& n)
{
    return v - n * dot(v, n);
}

// Eigenvalues of the Hessian of f restricted to the sphere of radius r at a
// point with outward unit normal n.
template <class T>
std::pair<T, T> tangent_hessian_eigenvalues(const FieldSample<T>& s, const Vec3<T>& n, const T& r)
{
    auto [e1, e2] = tangent_frame(n);
    T shift = dot(s.grad, n) / r;
    Vec3<T> he1 = mul(s.hess, e1);
    Vec3<T> he2 = mul(s.hess, e2);
    T a = dot(e1, he1) - shift;
    T b = dot(e1, he2);
    T c = dot(e2, he2) - shift;
    return sym2_eigenvalues(a, b, c);
}

Kind classify(double l1, double l2, double hess_tol);

// Point at angle theta along the great circle through p (unit normal n from
// the center) heading in the unit tangent direction t.
template <class T>
Vec3<T> along_great_circle(const Vec3<T>& center, const T& r, const Vec3<T>& n, const Vec3<T>& t, const T& theta)
{
    using std::cos;
    using std::sin;
    using boost::multiprecision::cos;
    using boost::multiprecision::sin;
    return center + (n * cos(theta) + t * sin(theta)) * r;
}

template <class T>
Vec3<T> project_to_sphere(const Vec3<T>& x, const Vec3<T>& center, const T& r)
{
    return center + normalized(x - center) * r;
}

struct ZeroRefinement {
    Vec3q x;
    int iterations = 0;
    quad tangential_norm = 0;
    quad grad_norm = 0;
};

// Newton on {two best-conditioned minors of (x-a) x grad f, |x-a|^2 = r^2}.
// max_step bounds each update; nullopt on divergence or lack of convergence.
std::optional<ZeroRefinement> refine_sphere_zero(const PolyField<quad>& f, const Vec3q& a, const quad& r,
                                                 const Vec3q& start, const quad& max_step, double newton_tol,
                                                 int max_iterations = 60);

// Minors and their Jacobian rows at x: m = (x-a) x grad f.
struct MinorSystem {
    Vec3q m;
    Mat3<quad> jac;  // jac[i] = grad m_i
};
MinorSystem minor_system(const FieldSample<quad>& s, const Vec3q& d);

}  // namespace atlas

namespace atlas {

// Unit tangent of the polar curve at a point of it, oriented outward (away
// from the center). nullopt where the curve is tangent to the sphere.
std::optional<Vec3q> polar_tangent(const PolyField<quad>& f, const Vec3q& a, const Vec3q& x);

struct ContinuationOptions {
    double max_turn = 0.2;       // radians between consecutive tangents
    double min_rel_step = 1e-14; // step floor relative to r
    int max_steps = 20000;
    double newton_tol = 1e-12;
};

// Follow the polar curve through x0 on the sphere of radius r0 to radius r1
// by tangent prediction and Newton correction.
std::optional<Vec3q> continue_on_polar_curve(const PolyField<quad>& f, const Vec3q& a, const Vec3q& x0,
                                             const quad& r0, const quad& r1, const ContinuationOptions& opt = {});

}  // namespace atlas
