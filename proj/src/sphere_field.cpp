#include "atlas/sphere_field.hpp"

#include <algorithm>
#include <cmath>

namespace atlas {

std::string to_string(Kind k)
{
    switch (k) {
    case Kind::min: return "min";
    case Kind::max: return "max";
    case Kind::saddle: return "saddle";
    case Kind::degenerate: return "degenerate";
    }
    return "?";
}

FieldPair::FieldPair(const Polynomial& p) : poly(p), d(p), q(p), coef_scale(p.max_abs_coefficient().convert_to<double>()) {}

Kind classify(double l1, double l2, double hess_tol)
{
    if (std::abs(l1) < hess_tol || std::abs(l2) < hess_tol) return Kind::degenerate;
    if (l1 > 0 && l2 > 0) return Kind::min;
    if (l1 < 0 && l2 < 0) return Kind::max;
    return Kind::saddle;
}

MinorSystem minor_system(const FieldSample<quad>& s, const Vec3q& d)
{
    MinorSystem out;
    out.m = cross(d, s.grad);
    // d/dx_k (d x g) = e_k x g + d x H e_k
    for (int k = 0; k < 3; ++k) {
        Vec3q ek(0, 0, 0);
        ek[k] = 1;
        Vec3q hk(s.hess[0][k], s.hess[1][k], s.hess[2][k]);
        Vec3q col = cross(ek, s.grad) + cross(d, hk);
        for (int i = 0; i < 3; ++i) out.jac[i][k] = col[i];
    }
    return out;
}

std::optional<ZeroRefinement> refine_sphere_zero(const PolyField<quad>& f, const Vec3q& a, const quad& r,
                                                 const Vec3q& start, const quad& max_step, double newton_tol,
                                                 int max_iterations)
{
    Vec3q x = project_to_sphere(start, a, r);
    for (int it = 1; it <= max_iterations; ++it) {
        auto s = f.sample(x);
        Vec3q d = x - a;
        MinorSystem ms = minor_system(s, d);
        // The minor along the dominant axis of d is dependent on the others.
        int drop = 0;
        for (int i = 1; i < 3; ++i)
            if (abs(d[i]) > abs(d[drop])) drop = i;
        int i0 = (drop + 1) % 3, i1 = (drop + 2) % 3;
        Mat3<quad> J{};
        J[0] = ms.jac[i0];
        J[1] = ms.jac[i1];
        J[2] = {2 * d.x, 2 * d.y, 2 * d.z};
        Vec3q rhs(-ms.m[i0], -ms.m[i1], -(dot(d, d) - r * r));
        auto step = solve3(J, rhs, 1e-32);
        if (!step) return std::nullopt;
        quad len = norm(*step);
        Vec3q dx = *step;
        if (len > max_step) dx = dx * (max_step / len);
        x = project_to_sphere(x + dx, a, r);
        if (len < quad(1e-30) * r) {
            auto s2 = f.sample(x, false);
            Vec3q n = normalized(x - a);
            ZeroRefinement z;
            z.x = x;
            z.iterations = it;
            z.grad_norm = norm(s2.grad);
            z.tangential_norm = norm(tangential(s2.grad, n));
            if (z.tangential_norm > quad(newton_tol) * (1 + z.grad_norm)) return std::nullopt;
            return z;
        }
    }
    auto s2 = f.sample(x, false);
    Vec3q n = normalized(x - a);
    ZeroRefinement z;
    z.x = x;
    z.iterations = max_iterations;
    z.grad_norm = norm(s2.grad);
    z.tangential_norm = norm(tangential(s2.grad, n));
    if (z.tangential_norm > quad(newton_tol) * (1 + z.grad_norm)) return std::nullopt;
    return z;
}

}  // namespace atlas

namespace atlas {

std::optional<Vec3q> polar_tangent(const PolyField<quad>& f, const Vec3q& a, const Vec3q& x)
{
    auto s = f.sample(x);
    Vec3q d = x - a;
    MinorSystem ms = minor_system(s, d);
    // tangent = kernel of the minor Jacobian; take the best-conditioned pair of rows
    Vec3q best;
    quad best_norm = -1;
    for (int i = 0; i < 3; ++i) {
        Vec3q ri(ms.jac[i][0], ms.jac[i][1], ms.jac[i][2]);
        Vec3q rj(ms.jac[(i + 1) % 3][0], ms.jac[(i + 1) % 3][1], ms.jac[(i + 1) % 3][2]);
        Vec3q c = cross(ri, rj);
        quad nc = norm(c);
        if (nc > best_norm) {
            best_norm = nc;
            best = c;
        }
    }
    if (best_norm <= 0) return std::nullopt;
    Vec3q t = best / best_norm;
    quad radial = dot(t, normalized(d));
    if (radial < 0) {
        t = -t;
        radial = -radial;
    }
    if (radial < quad(1e-12)) return std::nullopt;
    return t;
}

std::optional<Vec3q> continue_on_polar_curve(const PolyField<quad>& f, const Vec3q& a, const Vec3q& x0,
                                             const quad& r0, const quad& r1, const ContinuationOptions& opt)
{
    Vec3q x = x0;
    quad r = r0;
    if (r1 == r0) return x;
    const int dir = r1 > r0 ? 1 : -1;
    quad dr = abs(r1 - r0) / 4;
    const quad cos_turn = cos(quad(opt.max_turn));
    auto t = polar_tangent(f, a, x);
    if (!t) return std::nullopt;
    for (int it = 0; it < opt.max_steps; ++it) {
        quad remaining = abs(r1 - r);
        if (remaining == 0) return x;
        quad step = dr < remaining ? dr : remaining;
        Vec3q n = normalized(x - a);
        quad radial = dot(*t, n);
        Vec3q pred = x + *t * (quad(dir) * step / radial);
        quad target = r + quad(dir) * step;
        quad move = norm(pred - x);
        auto z = refine_sphere_zero(f, a, target, pred, move / 4 + quad(1e-30) * target, opt.newton_tol, 16);
        bool good = false;
        std::optional<Vec3q> tn;
        if (z && norm(z->x - pred) <= quad(0.1) * move + quad(1e-28) * target) {
            tn = polar_tangent(f, a, z->x);
            good = tn && dot(*tn, *t) >= cos_turn;
        }
        if (!good) {
            dr = step / 2;
            if (dr < quad(opt.min_rel_step) * r) return std::nullopt;
            continue;
        }
        x = z->x;
        r = target;
        t = tn;
        dr = step * quad(1.5);
    }
    return std::nullopt;
}

}  // namespace atlas
