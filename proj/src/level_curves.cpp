#include "atlas/level_curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atlas {

std::vector<quad> isolate_roots(const PolyField<quad>& f, const quad& level, const PathFn& path, const quad& s0,
                                const quad& s1, const RootSearchOptions& opt)
{
    struct S {
        quad s, g, g1, g2;
    };
    auto eval = [&](const quad& s) {
        PathPoint p = path(s);
        auto fs = f.sample(p.x, true);
        S o;
        o.s = s;
        o.g = fs.f - level;
        o.g1 = dot(fs.grad, p.d1);
        o.g2 = dot(p.d1, mul(fs.hess, p.d1)) + dot(fs.grad, p.d2);
        return o;
    };
    auto eval1 = [&](const quad& s) {
        PathPoint p = path(s);
        auto fs = f.sample(p.x, false);
        S o;
        o.s = s;
        o.g = fs.f - level;
        o.g1 = dot(fs.grad, p.d1);
        o.g2 = 0;
        return o;
    };
    auto sgn = [](const quad& v) { return v < 0 ? -1 : 1; };

    auto refine = [&](S lo, S hi) {
        const quad tol = quad(1e-30) * (abs(hi.s) + abs(lo.s) + abs(s1 - s0));
        for (int it = 0; it < 300; ++it) {
            if (hi.s - lo.s <= tol) break;
            const S& best = abs(lo.g) < abs(hi.g) ? lo : hi;
            quad cand = best.g1 != 0 ? best.s - best.g / best.g1 : (lo.s + hi.s) / 2;
            quad width = hi.s - lo.s;
            if (!(cand > lo.s && cand < hi.s) || it % 4 == 3) cand = (lo.s + hi.s) / 2;
            S m = eval1(cand);
            if (m.g == 0) return m.s;
            if (sgn(m.g) == sgn(lo.g)) lo = m;
            else hi = m;
            // fall back to bisection when Newton stalls on one side
            if (hi.s - lo.s > quad(0.75) * width && it % 4 != 3) {
                S mid = eval1((lo.s + hi.s) / 2);
                if (mid.g == 0) return mid.s;
                if (sgn(mid.g) == sgn(lo.g)) lo = mid;
                else hi = mid;
            }
        }
        return abs(lo.g) < abs(hi.g) ? lo.s : hi.s;
    };

    std::vector<quad> roots;
    const int n = std::max(1, opt.initial_samples);
    std::vector<S> samples;
    samples.reserve(n + 1);
    for (int i = 0; i <= n; ++i) samples.push_back(eval(s0 + (s1 - s0) * quad(i) / quad(n)));
    const quad min_w = (s1 - s0) * quad(opt.min_rel_width);
    const quad K = opt.safety;
    std::vector<std::pair<S, S>> stack;
    for (int i = 0; i < n; ++i) {
        stack.emplace_back(samples[i], samples[i + 1]);
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            quad h = b.s - a.s;
            S m = eval((a.s + b.s) / 2);
            bool same = sgn(a.g) == sgn(m.g) && sgn(m.g) == sgn(b.g);
            quad bound = K * (abs(m.g1) * h / 2 + abs(m.g2) * h * h / 8);
            if (same && abs(m.g) > bound) continue;
            bool mono = abs(m.g1) > K * abs(m.g2) * h / 2;
            if (mono || h < min_w) {
                if (sgn(a.g) != sgn(b.g)) roots.push_back(refine(a, b));
                continue;
            }
            stack.emplace_back(m, b);
            stack.emplace_back(a, m);
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

PathFn great_arc_path(const Vec3q& center, const quad& r, const Vec3q& from, const Vec3q& to, quad* length)
{
    Vec3q n0 = normalized(from - center);
    Vec3q n1 = normalized(to - center);
    quad c = dot(n0, n1);
    Vec3q perp = n1 - n0 * c;
    quad sn = norm(perp);
    Vec3q t;
    if (sn < quad(1e-20)) {
        t = tangent_frame(n0).first;
        sn = 0;
    } else {
        t = perp / sn;
    }
    quad angle = atan2(sn, c);
    if (length) *length = angle * r;
    return [center, r, n0, t](const quad& s) {
        quad th = s / r;
        quad cs = cos(th), sn2 = sin(th);
        PathPoint p;
        p.x = center + (n0 * cs + t * sn2) * r;
        p.d1 = t * cs - n0 * sn2;
        p.d2 = (n0 * cs + t * sn2) * (-1 / r);
        return p;
    };
}

PathFn full_great_circle(const Vec3q& center, const quad& r, const Vec3q& n, const Vec3q& t)
{
    return [center, r, n, t](const quad& s) {
        quad th = s / r;
        quad cs = cos(th), sn = sin(th);
        PathPoint p;
        p.x = center + (n * cs + t * sn) * r;
        p.d1 = t * cs - n * sn;
        p.d2 = (n * cs + t * sn) * (-1 / r);
        return p;
    };
}

PathFn segment_path(const Vec3q& from, const Vec3q& to)
{
    Vec3q d = to - from;
    quad len = norm(d);
    Vec3q u = len > 0 ? d / len : Vec3q(1, 0, 0);
    return [from, u](const quad& s) {
        PathPoint p;
        p.x = from + u * s;
        p.d1 = u;
        p.d2 = {0, 0, 0};
        return p;
    };
}

namespace {

std::vector<Vec3q> fibonacci_directions(int n)
{
    std::vector<Vec3q> out;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double y = 1 - (i + 0.5) * 2.0 / n;
        double rad = std::sqrt(1 - y * y);
        double th = golden * i;
        out.emplace_back(quad(rad * std::cos(th)), quad(y), quad(rad * std::sin(th)));
    }
    return out;
}

double point_segment_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, double* seg_len)
{
    Vec3d d = b - a;
    double l2 = dot(d, d);
    *seg_len = std::sqrt(l2);
    double t = l2 > 0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
    return norm(p - (a + d * t));
}

}  // namespace

SphereLevelSet::SphereLevelSet(const FieldPair& f, const Vec3q& center, const quad& r, const quad& level,
                               const std::vector<SphereExtremum>& extrema, TraceOptions opt)
    : f_(f), c_(center), r_(r), level_(level), opt_(opt)
{
    // Pole: the candidate farthest from the level set to first order.
    quad best = -1;
    for (const auto& dir : fibonacci_directions(96)) {
        Vec3q p = c_ + dir * r_;
        auto s = f_.q.sample(p, false);
        Vec3q gs = tangential(s.grad, dir);
        quad score = abs(s.f - level_) / (norm(gs) * r_ + abs(s.f - level_) * quad(1e-6) + quad(1e-300));
        if (score > best) {
            best = score;
            pole_ = p;
        }
    }
    pole_sign_ = f_.q.value(pole_) - level_ < 0 ? -1 : 1;
    for (const auto& e : extrema) crossing_parity(e.x, -1);
}

int SphereLevelSet::add_curve(const Vec3q& seed)
{
    CurveTracer<SphereGeometry> tracer(f_.q, level_, SphereGeometry{c_, r_}, opt_);
    TracedCurve curve = tracer.trace(seed);
    if (!curve.ok || !curve.closed) ok_ = false;
    curves_.push_back(std::move(curve));
    regions_valid_ = false;
    return static_cast<int>(curves_.size()) - 1;
}

int SphereLevelSet::curve_through(const Vec3q& y) const
{
    SphereGeometry geo{c_, r_};
    Vec3q g = f_.q.sample(y, false).grad;
    Vec3q n = geo.normal(y);
    Vec3q gs = tangential(g, n);
    Vec3d t = to_double(cross(n, gs));
    Vec3d yd = to_double(y);
    const double r = to_double(r_);
    int best_curve = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    double best_len = 0;
    for (std::size_t ci = 0; ci < curves_.size(); ++ci) {
        const auto& c = curves_[ci];
        for (std::size_t si = 0; si < c.segment_count(); ++si) {
            auto [a, b] = c.segment(si);
            double len;
            double d = point_segment_distance(yd, a, b, &len);
            if (d < best_dist && dot(b - a, t) > 0) {
                best_dist = d;
                best_len = len;
                best_curve = static_cast<int>(ci);
            }
        }
    }
    if (best_curve >= 0 && best_dist <= 0.1 * best_len + 1e-12 * r) return best_curve;
    return -1;
}

int SphereLevelSet::locate_or_trace(const Vec3q& y)
{
    int id = curve_through(y);
    return id >= 0 ? id : add_curve(y);
}

std::vector<char> SphereLevelSet::crossing_parity(const Vec3q& q, int ignore_curve)
{
    quad len;
    PathFn path = great_arc_path(c_, r_, pole_, q, &len);
    std::vector<char> parity(curves_.size(), 0);
    if (len <= 0) return parity;
    RootSearchOptions ro;
    ro.initial_samples = 64;
    auto roots = isolate_roots(f_.q, level_, path, quad(0), len, ro);
    CurveTracer<SphereGeometry> tracer(f_.q, level_, SphereGeometry{c_, r_}, opt_);
    for (const auto& s : roots) {
        Vec3q y = path(s).x;
        int id = curve_through(y);
        if (id < 0) {
            // near the end point the crossing may belong to the ignored curve
            if (ignore_curve >= 0 && len - s < quad(1e-9) * r_) continue;
            id = add_curve(y);
        }
        parity.resize(curves_.size(), 0);
        if (id != ignore_curve) parity[id] ^= 1;
    }
    parity.resize(curves_.size(), 0);
    return parity;
}

std::vector<char> SphereLevelSet::sides(const Vec3q& q) { return crossing_parity(q, -1); }

void SphereLevelSet::build_regions()
{
    for (int guard = 0; guard < 16; ++guard) {
        std::size_t n = curves_.size();
        nesting_.assign(n, std::vector<char>(n, 0));
        for (std::size_t i = 0; i < n && i < curves_.size(); ++i) {
            const auto& c = curves_[i];
            std::size_t vi = 0;
            quad bd = -1;
            for (std::size_t k = 0; k < c.points.size(); ++k) {
                quad d = norm(c.points[k] - pole_);
                if (bd < 0 || d < bd) {
                    bd = d;
                    vi = k;
                }
            }
            Vec3q v = curves_[i].points[vi];
            auto par = crossing_parity(v, static_cast<int>(i));
            for (std::size_t j = 0; j < n && j < par.size(); ++j) nesting_[i][j] = (j == i) ? 0 : par[j];
        }
        if (curves_.size() == n) break;
    }
    std::size_t n = curves_.size();
    nesting_.resize(n, std::vector<char>(n, 0));
    for (auto& row : nesting_) row.resize(n, 0);
    std::vector<int> depth(n, 0), parent(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) depth[i] += nesting_[i][j];
    for (std::size_t i = 0; i < n; ++i) {
        int best = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (nesting_[i][j] && (best < 0 || depth[j] > depth[best])) best = static_cast<int>(j);
        parent[i] = best;
    }
    regions_.clear();
    Region outer;
    outer.id = 0;
    outer.sign = pole_sign_;
    outer.parent_curve = -1;
    regions_.push_back(outer);
    for (std::size_t i = 0; i < n; ++i) {
        Region reg;
        reg.id = static_cast<int>(i) + 1;
        reg.sign = (depth[i] % 2 == 0) ? -pole_sign_ : pole_sign_;
        reg.parent_curve = static_cast<int>(i);
        reg.boundary_curves.push_back(static_cast<int>(i));
        regions_.push_back(reg);
    }
    for (std::size_t i = 0; i < n; ++i) {
        int host = parent[i] < 0 ? 0 : parent[i] + 1;
        regions_[host].boundary_curves.push_back(static_cast<int>(i));
    }
    for (auto& reg : regions_) reg.boundary_circle_count = static_cast<int>(reg.boundary_curves.size());
    regions_valid_ = true;
}

const std::vector<Region>& SphereLevelSet::regions()
{
    if (!regions_valid_) build_regions();
    return regions_;
}

int SphereLevelSet::region_of(const Vec3q& q)
{
    for (int guard = 0; guard < 8; ++guard) {
        regions();
        std::size_t before = curves_.size();
        auto par = crossing_parity(q, -1);
        if (curves_.size() != before) continue;
        int inner = -1;
        int inner_depth = -1;
        for (std::size_t j = 0; j < par.size(); ++j) {
            if (!par[j]) continue;
            int d = 0;
            for (std::size_t k = 0; k < par.size(); ++k) d += nesting_[j][k];
            if (d > inner_depth) {
                inner_depth = d;
                inner = static_cast<int>(j);
            }
        }
        int id = inner + 1;
        quad v = f_.q.value(q) - level_;
        int s = v < 0 ? -1 : 1;
        if (v != 0 && s != regions_[id].sign) ok_ = false;
        return id;
    }
    ok_ = false;
    return -1;
}

std::optional<Vec3q> SphereLevelSet::sample_point(int region_id)
{
    const auto& regs = regions();
    if (region_id < 0 || region_id >= static_cast<int>(regs.size())) return std::nullopt;
    if (region_id == 0) return pole_;
    const Region reg = regs[region_id];
    const auto& c = curves_[reg.parent_curve];
    SphereGeometry geo{c_, r_};
    std::size_t stride = std::max<std::size_t>(1, c.points.size() / 8);
    for (std::size_t k = 0; k < c.points.size(); k += stride) {
        Vec3q y = c.points[k];
        Vec3q n = geo.normal(y);
        Vec3q gs = tangential(f_.q.sample(y, false).grad, n);
        if (norm(gs) == 0) continue;
        Vec3q u = normalized(gs) * quad(reg.sign);
        for (quad eps = quad(1e-4) * r_; eps > quad(1e-14) * r_; eps /= 10) {
            Vec3q p = geo.move(y, u, eps);
            if (region_of(p) == region_id) return p;
        }
    }
    return std::nullopt;
}

nlohmann::json SphereLevelSet::to_json()
{
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : curves_) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : c.pd) pts.push_back({p.x, p.y, p.z});
        cj.push_back({{"closed", c.closed}, {"points", pts}});
    }
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& reg : regions())
        rj.push_back({{"id", reg.id}, {"sign", reg.sign}, {"boundary_circle_count", reg.boundary_circle_count}});
    return {{"level", to_double(level_)}, {"radius", to_double(r_)}, {"curves", cj}, {"regions", rj}};
}

}  // namespace atlas
