#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "atlas/numeric.hpp"
#include "atlas/poly.hpp"

namespace atlas {

struct TracedCurve {
    std::vector<Vec3q> points;
    std::vector<Vec3d> pd;  // double copy for geometric queries
    bool closed = false;
    bool ok = true;         // false when the tracer hit its step floor or step cap
    int boundary_ends = 0;  // 2 for a complete open arc clipped by a box

    void finalize()
    {
        pd.resize(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) pd[i] = to_double(points[i]);
    }
    std::size_t segment_count() const
    {
        if (points.size() < 2) return 0;
        return closed ? points.size() : points.size() - 1;
    }
    std::pair<Vec3d, Vec3d> segment(std::size_t i) const { return {pd[i], pd[(i + 1) % pd.size()]}; }
};

struct TraceOptions {
    double max_turn = 0.1;  // radians per step
    double h_init = 1e-3;   // relative to the geometry scale
    double h_max = 0.02;
    double h_min = 1e-22;
    std::size_t max_steps = 400000;
};

// Geodesics on the sphere |x - c| = r.
struct SphereGeometry {
    Vec3q c;
    quad r;

    Vec3q normal(const Vec3q& x) const { return (x - c) / r; }
    quad scale() const { return r; }
    Vec3q move(const Vec3q& x, const Vec3q& dir, const quad& s) const
    {
        Vec3q n = normal(x);
        quad th = s / r;
        return c + (n * cos(th) + dir * sin(th)) * r;
    }
    Vec3q move_tangent(const Vec3q& x, const Vec3q& dir, const quad& s) const
    {
        Vec3q n = normal(x);
        quad th = s / r;
        return dir * cos(th) - n * sin(th);
    }
    Vec3q snap(const Vec3q& x) const { return c + normalized(x - c) * r; }
    bool inside(const Vec3q&) const { return true; }
};

// Straight lines in the plane z = const, clipped to an axis box.
struct PlaneGeometry {
    quad z;
    quad x0, x1, y0, y1;

    Vec3q normal(const Vec3q&) const { return {0, 0, 1}; }
    quad scale() const { return std::max(x1 - x0, y1 - y0); }
    Vec3q move(const Vec3q& x, const Vec3q& dir, const quad& s) const { return x + dir * s; }
    Vec3q move_tangent(const Vec3q&, const Vec3q& dir, const quad&) const { return dir; }
    Vec3q snap(const Vec3q& x) const { return {x.x, x.y, z}; }
    bool inside(const Vec3q& x) const { return x.x >= x0 && x.x <= x1 && x.y >= y0 && x.y <= y1; }
};

template <class Geometry>
class CurveTracer {
public:
    CurveTracer(const PolyField<quad>& f, quad level, Geometry geo, TraceOptions opt = {})
        : f_(f), level_(level), geo_(geo), opt_(opt)
    {
    }

    const Geometry& geometry() const { return geo_; }
    const quad& level() const { return level_; }

    // Unit tangent n x grad_S f; zero vector where the tangential gradient vanishes.
    Vec3q tangent(const Vec3q& x) const
    {
        Vec3q g = f_.sample(x, false).grad;
        Vec3q n = geo_.normal(x);
        Vec3q gs = g - n * dot(g, n);
        quad len = norm(gs);
        if (len == 0) return {0, 0, 0};
        return cross(n, gs) / len;
    }

    // Move a point onto the curve along the tangential gradient direction.
    std::optional<Vec3q> correct(const Vec3q& start, int max_iter = 12) const
    {
        Vec3q x = geo_.snap(start);
        auto s0 = f_.sample(x, false);
        Vec3q n = geo_.normal(x);
        Vec3q gs = s0.grad - n * dot(s0.grad, n);
        quad len = norm(gs);
        if (len == 0) return std::nullopt;
        Vec3q u = gs / len;
        quad s = 0;
        quad tol = quad(1e-28) * geo_.scale();
        for (int it = 0; it < max_iter; ++it) {
            Vec3q p = geo_.move(x, u, s);
            auto sp = f_.sample(p, false);
            quad g1 = dot(sp.grad, geo_.move_tangent(x, u, s));
            if (g1 == 0) return std::nullopt;
            quad ds = -(sp.f - level_) / g1;
            s += ds;
            if (abs(ds) <= tol) return geo_.move(x, u, s);
        }
        Vec3q p = geo_.move(x, u, s);
        auto [v, mag] = f_.value_and_scale(p);
        if (abs(v - level_) <= quad(1e-30) * (mag + abs(level_))) return p;  // a few thousand ulps of the term sum
        return std::nullopt;
    }

    TracedCurve trace(const Vec3q& seed) const
    {
        TracedCurve out;
        auto fwd = walk(seed, 1, true);
        if (fwd.closed) {
            out = std::move(fwd);
        } else {
            auto back = walk(seed, -1, false);
            out.ok = fwd.ok && back.ok;
            out.boundary_ends = fwd.boundary_ends + back.boundary_ends;
            out.points.assign(back.points.rbegin(), back.points.rend());
            if (!out.points.empty()) out.points.pop_back();  // seed appears in both halves
            out.points.insert(out.points.end(), fwd.points.begin(), fwd.points.end());
        }
        out.finalize();
        return out;
    }

private:
    TracedCurve walk(const Vec3q& seed, int orientation, bool allow_close) const
    {
        TracedCurve out;
        const quad sc = geo_.scale();
        const quad h_max = quad(opt_.h_max) * sc;
        const quad h_min = quad(opt_.h_min) * sc;
        const quad cos_turn = cos(quad(opt_.max_turn));
        quad h = quad(opt_.h_init) * sc;

        Vec3q x = seed;
        Vec3q t0 = tangent(seed) * quad(orientation);
        Vec3q t = t0;
        out.points.push_back(seed);
        quad travelled = 0;
        for (std::size_t step = 0; step < opt_.max_steps; ++step) {
            Vec3q pred = geo_.move(x, t, h);
            auto corr = correct(pred);
            bool good = false;
            Vec3q t_new;
            if (corr) {
                quad shift = norm(*corr - pred);
                t_new = tangent(*corr) * quad(orientation);
                good = shift <= quad(0.3) * h && norm(t_new) > 0 && dot(t_new, t) >= cos_turn;
            }
            if (!good) {
                h /= 2;
                if (h < h_min) {
                    out.ok = false;
                    return out;
                }
                continue;
            }
            Vec3q xn = *corr;
            if (!geo_.inside(xn)) {
                out.points.push_back(xn);
                out.boundary_ends = 1;
                return out;
            }
            travelled += norm(xn - x);
            if (allow_close && out.points.size() > 3 && travelled > 2 * h) {
                // closure: the seed lies on the new chord and the direction agrees
                Vec3q seg = xn - x;
                quad len2 = dot(seg, seg);
                quad tpar = dot(seed - x, seg) / len2;
                if (tpar >= 0 && tpar <= 1) {
                    quad dist = norm(seed - (x + seg * tpar));
                    if (dist <= quad(0.1) * sqrt(len2) && dot(t_new, t0) > 0) {
                        out.closed = true;
                        return out;
                    }
                }
            }
            out.points.push_back(xn);
            x = xn;
            t = t_new;
            h = std::min(h * quad(1.3), h_max);
        }
        out.ok = false;
        return out;
    }

    const PolyField<quad>& f_;
    quad level_;
    Geometry geo_;
    TraceOptions opt_;
};

// A path x(s) with first and second derivatives, used for 1D root isolation.
struct PathPoint {
    Vec3q x, d1, d2;
};
using PathFn = std::function<PathPoint(const quad&)>;

struct RootSearchOptions {
    int initial_samples = 64;
    double safety = 4.0;
    double min_rel_width = 1e-26;
};

// All roots of f(x(s)) - level for s in [s0, s1]. Intervals are discarded
// only when a second-order Taylor bound around their midpoint keeps f away
// from the level; otherwise they are split until monotone.
std::vector<quad> isolate_roots(const PolyField<quad>& f, const quad& level, const PathFn& path, const quad& s0,
                                const quad& s1, const RootSearchOptions& opt = {});

PathFn great_arc_path(const Vec3q& center, const quad& r, const Vec3q& from, const Vec3q& to, quad* length);
PathFn full_great_circle(const Vec3q& center, const quad& r, const Vec3q& n, const Vec3q& t);
PathFn segment_path(const Vec3q& from, const Vec3q& to);

}  // namespace atlas
