#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "atlas/oracle.hpp"

namespace atlas {

int FiberSample::chi_total() const
{
    int s = 0;
    for (const auto& c : per_component) s += c.chi;
    return s;
}

namespace {

bool independent_of_z(const Polynomial& p)
{
    for (const auto& [mono, coef] : p.terms())
        if (mono[2] != 0) return false;
    return true;
}

double planar_distance(const TracedCurve& c, const Vec3d& a)
{
    Vec3d a2{a.x, a.y, 0};
    double best = std::numeric_limits<double>::infinity();
    auto flat = [](Vec3d v) { return Vec3d{v.x, v.y, 0}; };
    for (std::size_t s = 0; s < c.segment_count(); ++s) {
        auto [p, q] = c.segment(s);
        p = flat(p);
        q = flat(q);
        Vec3d d = q - p;
        double l2 = dot(d, d);
        double u = l2 > 0 ? std::clamp(dot(a2 - p, d) / l2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(a2 - (p + d * u)));
    }
    if (c.segment_count() == 0 && !c.pd.empty()) best = norm(a2 - flat(c.pd[0]));
    return best;
}

PlanarBox planar_of(const Box& b) { return {b.lo.x, b.hi.x, b.lo.y, b.hi.y}; }

// ---- Euler characteristic per tube -------------------------------------
//
// Every component Y of f^-1(t) outside Int B_R lies in a single component
// of the complement of f^-1(lambda) outside Int B_R. Y is attributed through
// a point of Y on the sphere (region_of), or, when Y misses the ball, through
// the tangency branch passing the point of Y closest to a.

// Branch with f - lambda of sign `side` whose point at radius |q - a| lies
// within 1e-3 |q - a| of q, or -1.
int branch_through(const FieldPair& f, const std::vector<TangencyBranch>& branches, const Vec3q& a,
                   const quad& lambda, int side, const Vec3d& q)
{
    const Vec3d ad = to_double(a);
    const double r = norm(q - ad);
    int best = -1;
    double best_d = 1e-3 * r;
    for (const auto& b : branches) {
        if ((b.base.value - lambda < 0 ? -1 : 1) != side) continue;
        for (std::size_t k = 0; k + 1 < b.samples.size(); ++k) {
            const auto& s0 = b.samples[k];
            if (r < s0.r || r > b.samples[k + 1].r) continue;
            auto x = continue_on_polar_curve(f.q, a, s0.x, quad(s0.r), quad(r));
            if (!x) continue;
            double d = norm(to_double(*x) - q);
            if (d < best_d) {
                best_d = d;
                best = b.id;
            }
        }
    }
    return best;
}

int region_through_branch(const FieldPair& f, SphereLevelSet& ls, const std::vector<TangencyBranch>& branches,
                          int side, const Vec3d& q)
{
    int id = branch_through(f, branches, ls.center(), ls.level(), side, q);
    if (id < 0) return -1;
    for (const auto& b : branches)
        if (b.id == id) return ls.region_of(b.base.position);
    return -1;
}

struct Tube {
    int chi = 0;
    int region = -1;
};

// Curve points with every chord that comes within 2R of a (planar)
// subdivided to at most R/32, new points corrected onto the curve.
std::vector<Vec3q> densify_near(const FieldPair& f, const TracedCurve& c, const Vec3q& a, double R)
{
    const quad level = f.q.value(c.points.front());
    // the box sets the tracer's length scale, so keep it at the curve's extent
    quad x0 = c.points.front().x, x1 = x0, y0 = c.points.front().y, y1 = y0;
    for (const auto& p : c.points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    PlaneGeometry geo{c.points.front().z, x0 - 1, x1 + 1, y0 - 1, y1 + 1};
    CurveTracer<PlaneGeometry> tracer(f.q, level, geo);
    const Vec3d ad{to_double(a.x), to_double(a.y), 0};
    std::vector<Vec3q> out;
    const std::size_t n = c.points.size();
    const std::size_t segs = c.closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        const Vec3q& p = c.points[i];
        const Vec3q& q = c.points[(i + 1) % n];
        out.push_back(p);
        Vec3d pd{to_double(p.x), to_double(p.y), 0}, qd{to_double(q.x), to_double(q.y), 0};
        Vec3d d = qd - pd;
        double l2 = dot(d, d);
        double u = l2 > 0 ? std::clamp(dot(ad - pd, d) / l2, 0.0, 1.0) : 0.0;
        if (norm(ad - (pd + d * u)) > 2 * R) continue;
        int k = static_cast<int>(std::ceil(std::sqrt(l2) / (R / 32)));
        for (int j = 1; j < k; ++j) {
            Vec3q m = p + (q - p) * (quad(j) / k);
            if (auto y = tracer.correct(m)) out.push_back(*y);
        }
    }
    if (!c.closed) out.push_back(c.points.back());
    return out;
}

// Point of the plane curve f = t closest to a in the plane, refined from
// the nearest polyline point: f = t and (p - a) x grad f = 0.
Vec3q closest_point(const FieldPair& f, const std::vector<Vec3q>& pts, const Vec3q& a)
{
    auto pd = [&](const Vec3q& p) { return to_double(hypot(p.x - a.x, p.y - a.y)); };
    Vec3q x = *std::min_element(pts.begin(), pts.end(), [&](const Vec3q& u, const Vec3q& v) { return pd(u) < pd(v); });
    const quad t = f.q.value(x);
    for (int it = 0; it < 30; ++it) {
        auto s = f.q.sample(x);
        quad dx = x.x - a.x, dy = x.y - a.y;
        quad g1 = s.f - t, g2 = dx * s.grad.y - dy * s.grad.x;
        quad j11 = s.grad.x, j12 = s.grad.y;
        quad j21 = s.grad.y + dx * s.hess[0][1] - dy * s.hess[0][0];
        quad j22 = -s.grad.x + dx * s.hess[1][1] - dy * s.hess[0][1];
        quad det = j11 * j22 - j12 * j21;
        if (det == 0) break;
        quad sx = (g1 * j22 - g2 * j12) / det, sy = (j11 * g2 - j21 * g1) / det;
        x.x -= sx;
        x.y -= sy;
        if (abs(sx) + abs(sy) <= quad(1e-28) * (1 + abs(x.x) + abs(x.y))) break;
    }
    return x;
}

// Y = C x R minus the ball: chi(C x R) minus one disk per arc of C inside the
// disk of radius R around a.
std::optional<Tube> cylinder_tube(const FieldPair& f, const TracedCurve& c, SphereLevelSet& ls,
                                  const std::vector<TangencyBranch>& branches, int side)
{
    const Vec3q& aq = ls.center();
    const Vec3d a = to_double(aq);
    const double R = to_double(ls.radius());
    const std::vector<Vec3q> pts = densify_near(f, c, aq, R);
    auto planar_d = [&](const Vec3q& p) { return to_double(hypot(p.x - aq.x, p.y - aq.y)); };
    const std::size_t n = pts.size();
    std::vector<char> inside(n);
    for (std::size_t i = 0; i < n; ++i) inside[i] = planar_d(pts[i]) < R;
    // runs of inside points; the deepest point of each run represents it
    std::vector<std::size_t> holes;
    std::size_t start = 0;
    if (c.closed) {
        while (start < n && inside[start]) ++start;
        if (start == n) return std::nullopt;
    }
    for (std::size_t k = 0; k < n;) {
        if (!inside[(start + k) % n]) {
            ++k;
            continue;
        }
        std::size_t deepest = (start + k) % n;
        while (k < n && inside[(start + k) % n]) {
            std::size_t j = (start + k) % n;
            if (planar_d(pts[j]) < planar_d(pts[deepest])) deepest = j;
            ++k;
        }
        holes.push_back(deepest);
    }
    Tube tube;
    tube.chi = (c.closed ? 0 : 1) - static_cast<int>(holes.size());
    if (holes.empty()) {
        Vec3q tip = closest_point(f, pts, aq);
        tube.region = region_through_branch(f, ls, branches, side, {to_double(tip.x), to_double(tip.y), a.z});
        return tube.region >= 0 ? std::optional<Tube>(tube) : std::nullopt;
    }
    for (std::size_t h : holes) {
        const Vec3q& p = pts[h];
        quad dx = p.x - aq.x, dy = p.y - aq.y;
        quad dz = sqrt(ls.radius() * ls.radius() - dx * dx - dy * dy);
        int reg = ls.region_of({p.x, p.y, aq.z + dz});
        if (reg < 0 || (tube.region >= 0 && reg != tube.region)) return std::nullopt;
        tube.region = reg;
    }
    return tube;
}

std::optional<int> euler_planar(const FieldPair& f, double t, SphereLevelSet& ls, int region, double Rp,
                                const std::vector<TangencyBranch>& branches)
{
    const Vec3d a = to_double(ls.center());
    const double half = 1.05 * Rp;
    PlanarBox box{a.x - half, a.x + half, a.y - half, a.y + half};
    const int side = t < to_double(ls.level()) ? -1 : 1;
    int chi = 0;
    for (const auto& c : planar_level_curves(f, t, box, a.z)) {
        if (!c.ok || c.points.size() < 2) return std::nullopt;
        if (planar_distance(c, a) >= Rp) continue;
        auto tube = cylinder_tube(f, c, ls, branches, side);
        if (!tube) return std::nullopt;
        if (tube->region == region) chi += tube->chi;
    }
    return chi;
}

std::optional<int> euler_grid(const FieldPair& f, double t, SphereLevelSet& ls, int region, double Rp,
                              const std::vector<TangencyBranch>& branches, const OracleConfig& cfg)
{
    const Vec3d a = to_double(ls.center());
    const double R = to_double(ls.radius());
    auto soup = marching_tetrahedra(f.d, t, Box::cube(a, Rp), cfg.resolution_3d);
    TriangleSoup outside;
    outside.vertices = soup.vertices;
    for (const auto& tri : soup.triangles) {
        bool out = true;
        for (int q : tri) out = out && norm(soup.vertices[q] - a) >= R;
        if (out) outside.triangles.push_back(tri);
    }
    const double cell = 2 * Rp / cfg.resolution_3d;
    int chi = 0;
    for (const auto& comp : surface_components(outside, a)) {
        // nearest vertex to a decides: on the sphere, or a tip on a branch
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int ti : comp.triangle_ids)
            for (int q : outside.triangles[ti]) {
                double d = norm(outside.vertices[q] - a);
                if (d < bd) {
                    bd = d;
                    best = q;
                }
            }
        const Vec3d p = outside.vertices[best];
        int reg;
        if (bd < R + 2 * cell) {
            Vec3d u = (p - a) / bd;
            reg = ls.region_of(ls.center() + Vec3q(u.x, u.y, u.z) * ls.radius());
        } else {
            reg = region_through_branch(f, ls, branches, t < to_double(ls.level()) ? -1 : 1, p);
        }
        if (reg < 0) return std::nullopt;
        if (reg == region) chi += comp.chi;
    }
    return chi;
}

}  // namespace

FiberSample extract_fiber(const FieldPair& f, double t, const Box& box, const Vec3d& a, double R,
                          const OracleConfig& cfg)
{
    FiberSample out;
    out.t = t;
    out.box = box;
    if (independent_of_z(f.poly)) {
        out.planar = true;
        out.resolution = cfg.resolution_2d;
        for (const auto& c : planar_level_curves(f, t, planar_of(box), a.z, cfg.resolution_2d)) {
            FiberComponent fc;
            fc.chi = c.closed ? 0 : 1;  // circle x R or line x R
            fc.touches_box_boundary = true;
            fc.min_distance_to_a = planar_distance(c, a);
            fc.intersects_ball_R = fc.min_distance_to_a < R;
            out.per_component.push_back(fc);
        }
        return out;
    }
    out.resolution = cfg.resolution_3d;
    auto soup = marching_tetrahedra(f.d, t, box, cfg.resolution_3d);
    for (const auto& c : surface_components(soup, a)) {
        FiberComponent fc;
        fc.chi = c.chi;
        fc.touches_box_boundary = c.has_boundary;
        fc.min_distance_to_a = c.min_distance;
        fc.intersects_ball_R = c.min_distance < R;
        out.per_component.push_back(fc);
    }
    return out;
}

std::optional<int> euler_outside_ball(const FieldPair& f, double t, SphereLevelSet& level_set, int region,
                                      double R_prime, const std::vector<TangencyBranch>& branches,
                                      const OracleConfig& cfg)
{
    if (region < 0 || region >= level_set.region_count()) return std::nullopt;
    const std::size_t curves_before = level_set.curves().size();
    auto chi = independent_of_z(f.poly) ? euler_planar(f, t, level_set, region, R_prime, branches)
                                        : euler_grid(f, t, level_set, region, R_prime, branches, cfg);
    if (level_set.curves().size() != curves_before || !level_set.ok()) return std::nullopt;
    return chi;
}

bool compact_component_test(const FieldPair& f, double t, const Vec3d& a, double R, const Box& box,
                            const OracleConfig& cfg)
{
    if (independent_of_z(f.poly)) return false;  // cylinders are never compact
    auto soup = marching_tetrahedra(f.d, t, box, cfg.resolution_3d);
    TriangleSoup outside;
    outside.vertices = soup.vertices;
    for (const auto& tri : soup.triangles) {
        bool out = true;
        for (int q : tri) out = out && norm(soup.vertices[q] - a) >= R;
        if (out) outside.triangles.push_back(tri);
    }
    for (const auto& c : surface_components(outside, a))
        if (!c.has_boundary) return true;
    return false;
}

std::vector<double> sweep_schedule(double lambda, const std::vector<int>& signs, int k_min, int k_max)
{
    std::vector<double> out;
    for (int s : signs)
        for (int k = k_min; k <= k_max; ++k) out.push_back(lambda + s * std::pow(10.0, -k));
    return out;
}

SweepResult min_fiber_distance_sweep(const FieldPair& f, const std::vector<double>& schedule, const Vec3d& a, double R,
                                     const Box& box, const OracleConfig& cfg)
{
    SweepResult out;
    for (double t : schedule) {
        FiberSample s = extract_fiber(f, t, box, a, R, cfg);
        double mx = 0;
        for (int i = 0; i < s.components(); ++i) {
            const auto& c = s.per_component[i];
            out.rows.push_back({t, i, c.min_distance_to_a, c.chi, !s.planar && !c.touches_box_boundary});
            mx = std::max(mx, c.min_distance_to_a);
        }
        out.max_min_distance.push_back({t, mx});
    }
    return out;
}

std::string sweep_to_csv(const SweepResult& s)
{
    std::ostringstream os;
    os.precision(17);
    os << "t,component_id,min_distance,chi,compact\n";
    for (const auto& r : s.rows)
        os << r.t << ',' << r.component_id << ',' << r.min_distance << ',' << r.chi << ',' << (r.compact ? 1 : 0)
           << '\n';
    return os.str();
}

std::vector<double> compute_K0(const FieldPair& f, const Box& box, const Tolerances& tol, int seeds_per_axis)
{
    const bool planar = independent_of_z(f.poly);
    const double grad_tol = tol.grad_tol_base * (1 + f.coef_scale);
    // seed grids on nested boxes sharing the center, so that critical points
    // near the center are not missed by the coarse outer grid
    std::vector<Vec3d> seeds;
    const int per_axis = planar ? 4 * seeds_per_axis : seeds_per_axis;
    const int nz = planar ? 1 : per_axis;
    const Vec3d mid = (box.lo + box.hi) * 0.5;
    Vec3d half = (box.hi - box.lo) * 0.5;
    for (;;) {
        Box b{mid - half, mid + half};
        auto at = [](double lo, double hi, int m, int n) { return lo + (m + 0.5) * (hi - lo) / n; };
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j)
                for (int k = 0; k < nz; ++k)
                    seeds.push_back({at(b.lo.x, b.hi.x, i, per_axis), at(b.lo.y, b.hi.y, j, per_axis),
                                     planar ? mid.z : at(b.lo.z, b.hi.z, k, nz)});
        if (std::max({half.x, half.y, half.z}) < 1) break;
        half = half * 0.25;
    }
    std::vector<double> found(seeds.size(), std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t si = 0; si < seeds.size(); ++si) {
        // Levenberg-Marquardt on grad f = 0 in double, then Newton in quad
        Vec3d x = seeds[si];
        double mu = 1e-3;
        auto s = f.d.sample(x);
        double cost = dot(s.grad, s.grad);
        for (int it = 0; it < 200 && cost > 0; ++it) {
            Mat3<double> A{};
            Vec3d b;
            for (int r = 0; r < 3; ++r) {
                double br = 0;
                for (int c = 0; c < 3; ++c) {
                    double acc = 0;
                    for (int k = 0; k < 3; ++k) acc += s.hess[k][r] * s.hess[k][c];
                    A[r][c] = acc;
                    br += s.hess[c][r] * s.grad[c];
                }
                b[r] = -br;
            }
            double scale = A[0][0] + A[1][1] + A[2][2] + 1e-300;
            for (int r = 0; r < 3; ++r) A[r][r] += mu * scale;
            auto step = solve3(A, b);
            if (!step) break;
            Vec3d xn = x + *step;
            auto sn = f.d.sample(xn);
            double cn = dot(sn.grad, sn.grad);
            if (cn < cost) {
                x = xn;
                s = sn;
                cost = cn;
                mu = std::max(mu / 4, 1e-15);
                if (norm(*step) <= 1e-14 * (1 + norm(x))) break;
            } else {
                mu *= 8;
                if (mu > 1e12) break;
            }
        }
        Vec3q xq(x.x, x.y, x.z);
        bool converged = false;
        for (int it = 0; it < 12 && !converged; ++it) {
            auto sq = f.q.sample(xq);
            if (planar) {
                sq.grad.z = 0;
                for (int k = 0; k < 3; ++k) sq.hess[2][k] = sq.hess[k][2] = 0;
                sq.hess[2][2] = 1;
            }
            auto d = solve3(sq.hess, sq.grad * quad(-1));
            if (!d || norm(*d) > quad(1e-6) * (1 + norm(xq))) break;
            xq = xq + *d;
            converged = norm(*d) <= quad(1e-24) * (1 + norm(xq));
        }
        auto sq = f.q.sample(xq, false);
        if (converged && to_double(norm(sq.grad)) <= grad_tol * (1 + to_double(norm(xq))))
            found[si] = to_double(sq.f);
    }
    std::vector<double> vals;
    for (double v : found)
        if (std::isfinite(v)) vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < vals.size();) {
        std::size_t j = i;
        while (j + 1 < vals.size() && vals[j + 1] - vals[j] <= tol.lambda_cluster_tol * (1 + std::abs(vals[j]))) ++j;
        out.push_back(vals[(i + j) / 2]);
        i = j + 1;
    }
    return out;
}

}  // namespace atlas
