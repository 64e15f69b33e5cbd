#include <cmath>
#include <limits>
#include <unordered_map>

#include "atlas/oracle.hpp"

namespace atlas {

namespace {

// Segments bucketed on a uniform grid for nearest-curve queries.
class SegmentHash {
public:
    SegmentHash(const PlanarBox& box, int cells) : box_(box), cells_(cells)
    {
        cw_ = (box.x1 - box.x0) / cells;
        ch_ = (box.y1 - box.y0) / cells;
    }

    void add(const TracedCurve& c, int curve)
    {
        for (std::size_t s = 0; s < c.segment_count(); ++s) {
            auto [a, b] = c.segment(s);
            int i0 = cx(std::min(a.x, b.x)), i1 = cx(std::max(a.x, b.x));
            int j0 = cy(std::min(a.y, b.y)), j1 = cy(std::max(a.y, b.y));
            for (int i = i0; i <= i1; ++i)
                for (int j = j0; j <= j1; ++j) buckets_[key(i, j)].push_back({curve, static_cast<int>(s)});
        }
    }

    // Curve whose nearest segment runs along the tangent t within 10% of its length.
    int match(const std::vector<TracedCurve>& curves, const Vec3d& p, const Vec3d& t) const
    {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity(), best_len = 0;
        int i = cx(p.x), j = cy(p.y);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                auto it = buckets_.find(key(i + di, j + dj));
                if (it == buckets_.end()) continue;
                for (auto [c, s] : it->second) {
                    auto [a, b] = curves[c].segment(s);
                    Vec3d d = b - a;
                    double l2 = dot(d, d);
                    double u = l2 > 0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
                    double dist = norm(p - (a + d * u));
                    if (dist < best_d && dot(d, t) > 0) {
                        best_d = dist;
                        best_len = std::sqrt(l2);
                        best = c;
                    }
                }
            }
        if (best >= 0 && best_d <= 0.1 * best_len + 1e-12 * (box_.x1 - box_.x0)) return best;
        return -1;
    }

private:
    int cx(double x) const { return static_cast<int>(std::floor((x - box_.x0) / cw_)); }
    int cy(double y) const { return static_cast<int>(std::floor((y - box_.y0) / ch_)); }
    static std::int64_t key(int i, int j) { return (std::int64_t(i) << 32) ^ std::uint32_t(j); }

    PlanarBox box_;
    int cells_;
    double cw_, ch_;
    std::unordered_map<std::int64_t, std::vector<std::pair<int, int>>> buckets_;
};

// Coefficients in s of f(x) - t along the axis line where coordinate
// `free` equals s and the others are fixed.
std::vector<quad> line_coefficients(const Polynomial& p, int free, const std::array<double, 3>& fixed, double t)
{
    std::vector<Rational> c(p.degree() + 1, Rational(0));
    for (const auto& [e, coef] : p.terms()) {
        Rational term = coef;
        for (int k = 0; k < 3; ++k)
            if (k != free)
                for (int i = 0; i < e[k]; ++i) term *= Rational(fixed[k]);
        c[e[free]] += term;
    }
    c[0] -= Rational(t);
    std::vector<quad> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = rational_to<quad>(c[i]);
    while (out.size() > 1 && out.back() == 0) out.pop_back();
    return out;
}

quad horner(const std::vector<quad>& c, const quad& s)
{
    quad v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}

// Real roots in (lo, hi), isolated between the roots of the derivative, on
// which the polynomial is monotone.
std::vector<quad> real_roots_impl(const std::vector<quad>& c, const quad& lo, const quad& hi)
{
    if (c.size() < 2) return {};
    std::vector<quad> dc(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) dc[i - 1] = c[i] * quad(i);
    std::vector<quad> knots = {lo};
    for (const auto& r : real_roots_impl(dc, lo, hi)) knots.push_back(r);
    knots.push_back(hi);
    std::vector<quad> out;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        quad a = knots[k], b = knots[k + 1];
        quad fa = horner(c, a), fb = horner(c, b);
        if (fa == 0) {
            if (k > 0 && (out.empty() || out.back() != a)) out.push_back(a);
            continue;
        }
        if ((fa < 0) == (fb < 0) || fb == 0) continue;
        for (int it = 0; it < 200 && b - a > quad(4) * std::numeric_limits<quad>::epsilon() * (abs(a) + abs(b)); ++it) {
            quad m = (a + b) / 2;
            quad fm = horner(c, m);
            if (fm == 0) {
                a = b = m;
                break;
            }
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.push_back((a + b) / 2);
    }
    return out;
}

}  // namespace

std::vector<TracedCurve> planar_level_curves(const FieldPair& f, double t, const PlanarBox& box, double z0, int lines)
{
    const quad level(t);
    const quad qz(z0);
    PlaneGeometry geo{qz, quad(box.x0), quad(box.x1), quad(box.y0), quad(box.y1)};
    CurveTracer<PlaneGeometry> tracer(f.q, level, geo);
    std::vector<TracedCurve> curves;
    SegmentHash hash(box, 256);

    auto seed = [&](const Vec3q& y) {
        Vec3d tan = to_double(tracer.tangent(y));
        if (hash.match(curves, to_double(y), tan) >= 0) return;
        TracedCurve c = tracer.trace(y);
        if (c.points.size() < 2) return;
        curves.push_back(std::move(c));
        hash.add(curves.back(), static_cast<int>(curves.size()) - 1);
    };
    for (int i = 0; i < lines; ++i) {
        double y = box.y0 + (i + 0.5) * (box.y1 - box.y0) / lines;
        auto cx = line_coefficients(f.poly, 0, {0.0, y, z0}, t);
        for (const auto& s : real_roots_impl(cx, quad(box.x0), quad(box.x1))) seed({s, quad(y), qz});
        double x = box.x0 + (i + 0.5) * (box.x1 - box.x0) / lines;
        auto cy = line_coefficients(f.poly, 1, {x, 0.0, z0}, t);
        for (const auto& s : real_roots_impl(cy, quad(box.y0), quad(box.y1))) seed({quad(x), s, qz});
    }
    return curves;
}

}  // namespace atlas

namespace atlas {

std::vector<quad> real_roots(const std::vector<quad>& coefficients, const quad& lo, const quad& hi)
{
    return real_roots_impl(coefficients, lo, hi);
}

}  // namespace atlas
