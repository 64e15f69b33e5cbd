#include "atlas/index_calculus.hpp"

#include <cmath>
#include <numbers>

namespace atlas {

std::optional<int> winding_index(const PolyField<quad>& f, const Vec3q& a, const quad& r, const Vec3q& p,
                                 const WindingOptions& opt)
{
    constexpr double pi = std::numbers::pi;
    const Vec3q n = normalized(p - a);
    auto [e1, e2] = tangent_frame(n);
    quad rho = quad(opt.loop_rel) * r;
    for (int h = 0; h <= opt.max_halvings; ++h, rho /= 2) {
        const quad theta = rho / r;
        double total = 0, prev = 0;
        bool ok = true;
        for (int k = 0; k <= opt.samples && ok; ++k) {
            quad phi = quad(2 * pi * k / opt.samples);
            Vec3q t = e1 * cos(phi) + e2 * sin(phi);
            Vec3q x = along_great_circle(a, r, n, t, theta);
            auto s = f.sample(x, false);
            Vec3q X = tangential(s.grad, normalized(x - a));
            if (norm(X) == 0) {
                ok = false;
                break;
            }
            double ang = std::atan2(to_double(dot(X, e2)), to_double(dot(X, e1)));
            if (k > 0) {
                double d = ang - prev;
                while (d > pi) d -= 2 * pi;
                while (d < -pi) d += 2 * pi;
                if (std::abs(d) > pi / 2) ok = false;
                total += d;
            }
            prev = ang;
        }
        if (ok) return static_cast<int>(std::lround(total / (2 * pi)));
    }
    return std::nullopt;
}

IndexedZero point_index(const FieldPair& f, const Vec3q& a, const CriticalPoint& p, const Tolerances& tol,
                        const WindingOptions& opt)
{
    (void)tol;
    IndexedZero out{p, 0, ""};
    if (p.kind != Kind::degenerate) {
        out.index = p.kind == Kind::saddle ? -1 : 1;
        out.method = "hessian-sign";
    } else if (auto w = winding_index(f.q, a, quad(p.radius), p.position, opt)) {
        out.index = *w;
        out.method = "winding";
    } else {
        out.method = "unresolved";
    }
    out.point.index = out.index;
    out.point.index_method = out.method;
    return out;
}

int region_index_sum(const std::vector<CriticalPoint>& members)
{
    int s = 0;
    for (const auto& p : members)
        if (!p.in_singular_set) s += p.index;
    return s;
}

bool poincare_hopf_audit(const std::vector<IndexedZero>& zeros)
{
    int s = 0;
    for (const auto& z : zeros) {
        if (z.method == "unresolved") return false;
        s += z.index;
    }
    return s == 2;
}

bool poincare_hopf_audit(const std::vector<CriticalPoint>& zeros)
{
    int s = 0;
    for (const auto& z : zeros) {
        if (z.index_method == "unresolved") return false;
        s += z.index;
    }
    return s == 2;
}

}  // namespace atlas
