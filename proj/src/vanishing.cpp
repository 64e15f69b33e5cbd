#include "atlas/vanishing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace atlas {

std::string to_string(Outcome o)
{
    switch (o) {
    case Outcome::positive: return "positive";
    case Outcome::negative: return "negative";
    default: return "undetermined";
    }
}

std::string to_string(VanishingVerdict v)
{
    switch (v) {
    case VanishingVerdict::vanishing: return "vanishing";
    case VanishingVerdict::none: return "none";
    default: return "undetermined";
    }
}

CandidateLists build_candidate_lists(const std::vector<TangencyBranch>& branches,
                                     const std::vector<Candidate>& candidates)
{
    CandidateLists out;
    for (int ci = 0; ci < static_cast<int>(candidates.size()); ++ci) {
        for (int id : candidates[ci].members) {
            const auto& b = branches[id];
            if (b.kind == Kind::min && b.direction == Direction::decreasing) out.P_min[ci].push_back(id);
            if (b.kind == Kind::max && b.direction == Direction::increasing) out.P_max[ci].push_back(id);
        }
        if (out.P_min.count(ci)) out.Lambda_min.push_back(ci);
        if (out.P_max.count(ci)) out.Lambda_max.push_back(ci);
    }
    return out;
}

namespace {

// Radius in (r0, r1] where the branch value crosses delta, by bisection on
// continuation from the sample at r0.
std::optional<double> crossing_radius(const FieldPair& f, const Vec3q& a, const Vec3q& x0, double r0, double r1,
                                      double delta, const Tolerances& tol)
{
    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    const quad d(delta);
    quad v0 = f.q.value(x0) - d;
    quad lo = r0, hi = r1;
    Vec3q xlo = x0;
    for (int it = 0; it < 80 && hi - lo > quad(1e-15) * hi; ++it) {
        quad mid = (lo + hi) / 2;
        auto y = continue_on_polar_curve(f.q, a, xlo, lo, mid, copt);
        if (!y) return std::nullopt;
        quad v = f.q.value(*y) - d;
        if ((v > 0) == (v0 > 0)) {
            lo = mid;
            xlo = *y;
        } else {
            hi = mid;
        }
    }
    return to_double((lo + hi) / 2);
}

}  // namespace

CriticalRadii distance_critical_values_on_level(const FieldPair& f, const Center& center, double delta,
                                                const std::vector<TangencyBranch>& branches, double R,
                                                const Tolerances& tol)
{
    const Vec3q a = center.as_quad();
    CriticalRadii out;
    const double eps = tol.lambda_cluster_tol * 1e-6 * (1 + std::abs(delta));
    for (const auto& b : branches) {
        const auto& s = b.samples;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
            double v0 = to_double(s[k].value) - delta, v1 = to_double(s[k + 1].value) - delta;
            if (k == 0 && std::abs(v0) <= eps) continue;  // the branch of p itself
            if ((v0 < 0) != (v1 < 0)) {
                if (auto r = crossing_radius(f, a, s[k].x, s[k].r, s[k + 1].r, delta, tol))
                    out.radii.push_back(*r);
                else
                    out.complete = false;
            }
        }
        if (s.empty()) continue;
        // a crossing beyond the traced range
        double vl = to_double(s.back().value) - delta;
        bool beyond = false;
        if (b.limit_kind == LimitKind::finite) beyond = (vl < 0) != (b.limit - delta < 0) && std::abs(b.limit - delta) > eps;
        if (b.limit_kind == LimitKind::plus_infinity) beyond = vl < 0;
        if (b.limit_kind == LimitKind::minus_infinity) beyond = vl > 0;
        if (b.limit_kind == LimitKind::undetermined) beyond = true;
        if (!beyond) continue;
        // extend the branch geometrically looking for the crossing
        ContinuationOptions copt;
        copt.newton_tol = tol.newton_tol;
        Vec3q x = s.back().x;
        double r = s.back().r;
        bool found = false;
        for (int k = 0; k < 40 && !found; ++k) {
            double next = r * 2;
            auto y = continue_on_polar_curve(f.q, a, x, quad(r), quad(next), copt);
            if (!y) break;
            double v = to_double(f.q.value(*y)) - delta;
            if ((v < 0) != (vl < 0)) {
                if (auto rc = crossing_radius(f, a, x, r, next, delta, tol)) {
                    out.radii.push_back(*rc);
                    found = true;
                }
                break;
            }
            x = *y;
            r = next;
        }
        if (!found) out.complete = false;
    }
    std::sort(out.radii.begin(), out.radii.end());
    out.radii.erase(std::remove_if(out.radii.begin(), out.radii.end(), [&](double r) { return r <= R; }),
                    out.radii.end());
    return out;
}

FlowResult flow_on_level(const PolyField<quad>& f, const Vec3q& a, const quad& delta, const Vec3q& x0,
                         const quad& target, int max_steps)
{
    // dx/dr = v / |v|^2 with v the part of the radial direction tangent to
    // the level set; |v| -> 0 at critical points of the distance.
    auto velocity = [&](const Vec3q& x, quad* w) {
        Vec3q n = normalized(x - a);
        Vec3q g = f.sample(x, false).grad;
        quad gn = norm(g);
        Vec3q u = gn > 0 ? g / gn : Vec3q(0, 0, 0);
        Vec3q v = n - u * dot(n, u);
        *w = dot(v, v);
        return v;
    };
    auto project = [&](Vec3q x) {
        for (int i = 0; i < 4; ++i) {
            auto s = f.sample(x, false);
            quad g2 = dot(s.grad, s.grad);
            if (g2 == 0) break;
            x = x - s.grad * ((s.f - delta) / g2);
        }
        return x;
    };
    FlowResult out;
    Vec3q x = x0;
    quad r = norm(x - a);
    const int dir = target > r ? 1 : -1;
    quad h = abs(target - r) / 16;
    for (int it = 0; it < max_steps; ++it) {
        quad remaining = abs(target - r);
        if (remaining <= quad(1e-20) * target) {
            out.end = FlowEnd::landed;
            out.x = x;
            return out;
        }
        quad w;
        Vec3q v = velocity(x, &w);
        if (w < quad(1e-24)) {
            out.end = FlowEnd::stalled;
            out.x = x;
            return out;
        }
        quad speed = sqrt(w);
        quad hmax = quad(0.02) * r * speed;  // |dx| = h / |v| stays below 2% of r
        quad step = std::min({h, hmax, remaining});
        // midpoint rule in r
        Vec3q xm = x + v * (quad(dir) * step / 2 / w);
        quad wm;
        Vec3q vm = velocity(xm, &wm);
        if (wm < quad(1e-24)) {
            out.end = FlowEnd::stalled;
            out.x = xm;
            return out;
        }
        Vec3q pred = x + vm * (quad(dir) * step / wm);
        Vec3q corr = project(pred);
        quad move = norm(pred - x);
        quad fix = norm(corr - pred);
        quad rn = norm(corr - a);
        bool overshoot = dir > 0 ? rn > target * (1 + quad(1e-18)) : rn < target * (1 - quad(1e-18));
        if (fix > quad(0.05) * move + quad(1e-28) * r || overshoot) {
            h = step / 2;
            if (h < quad(1e-16) * r) {
                // no progress: a critical point of the distance is right here
                out.end = FlowEnd::stalled;
                out.x = x;
                return out;
            }
            continue;
        }
        x = corr;
        r = rn;
        h = step * 2;
        if (abs(target - r) < quad(1e-12) * target) {
            // final snap onto the target sphere along the level set
            for (int i = 0; i < 4; ++i) {
                quad wv;
                Vec3q vv = velocity(x, &wv);
                if (wv < quad(1e-30)) break;
                x = project(x + vv * ((target - norm(x - a)) / wv));
            }
            out.end = FlowEnd::landed;
            out.x = x;
            return out;
        }
    }
    out.end = FlowEnd::failed;
    out.x = x;
    return out;
}

ZeroSearchResult zeros_on_sphere(const FieldPair& f, const Center& a, double rho,
                                 const std::vector<CriticalPoint>& zeros_R, double R, const Tolerances& tol, int depth)
{
    auto seeds = continue_zeros(f, a, zeros_R, R, rho, tol);
    return find_sphere_zeros_audited(f, a, quad(rho), depth, depth + 2, tol, seeds);
}

std::vector<SphereExtremum> extrema_of(const std::vector<CriticalPoint>& zeros)
{
    std::vector<SphereExtremum> out;
    for (const auto& z : zeros)
        if (z.kind == Kind::min || z.kind == Kind::max) out.push_back({z.position, z.kind});
        else if (z.kind == Kind::degenerate) out.push_back({z.position, Kind::degenerate});
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    int add()
    {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int i)
    {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int i, int j) { parent[find(i)] = find(j); }
};

// The first level crossing along a great circle leaving x.
std::optional<Vec3q> first_crossing(const FieldPair& f, const Vec3q& a, const quad& rho, const quad& level,
                                    const Vec3q& x)
{
    Vec3q n = normalized(x - a);
    auto [e1, e2] = tangent_frame(n);
    for (const Vec3q& t : {e1, e2, -e1, -e2}) {
        PathFn path = full_great_circle(a, rho, n, t);
        auto roots = isolate_roots(f.q, level, path, quad(0), quad(3.14159) * rho);
        if (!roots.empty()) return path(roots.front()).x;
    }
    return std::nullopt;
}

}  // namespace

TestResult isolated_intersection_test(const FieldPair& f, const Center& center, const TangencyBranch& p,
                                      const std::vector<TangencyBranch>& branches, double R,
                                      const std::vector<CriticalPoint>& zeros_R, const Tolerances& tol,
                                      const VanishingOptions& opt)
{
    const Vec3q a = center.as_quad();
    TestResult res;
    res.delta = to_double(p.base.value);
    const quad delta = p.base.value;
    auto crit = distance_critical_values_on_level(f, center, res.delta, branches, R, tol);
    res.critical_radii = crit.radii;
    if (!crit.complete) {
        res.detail = "a level crossing lies beyond the traced branches";
        return res;
    }

    std::vector<double> rungs;
    double first_gap = crit.radii.empty() ? R : crit.radii.front() - R;
    rungs.push_back(R + std::min(opt.first_rung * R, first_gap / 2));
    for (std::size_t i = 0; i + 1 < crit.radii.size(); ++i) rungs.push_back(0.5 * (crit.radii[i] + crit.radii[i + 1]));
    if (!crit.radii.empty()) rungs.push_back(1.5 * crit.radii.back());

    std::vector<std::unique_ptr<SphereLevelSet>> sets;
    for (double rho : rungs) {
        auto z = zeros_on_sphere(f, center, rho, zeros_R, R, tol, opt.depth);
        sets.push_back(std::make_unique<SphereLevelSet>(f, a, quad(rho), delta, extrema_of(z.zeros)));
        sets.back()->regions();
    }

    // p's circle on the lowest rung
    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    auto xp = continue_on_polar_curve(f.q, a, p.base.position, quad(R), quad(rungs[0]), copt);
    if (!xp) {
        res.detail = "branch continuation to the first rung failed";
        return res;
    }
    auto y = first_crossing(f, a, quad(rungs[0]), delta, *xp);
    if (!y) {
        // p is a nondegenerate extremum on S_R and the level does not reach
        // the next sphere near it: outside the ball the component is just p
        res.outcome = Outcome::positive;
        res.radius_used = rungs[0];
        res.detail = "the level set through p does not leave the ball near p";
        return res;
    }
    const int p_curve = sets[0]->locate_or_trace(*y);

    // union-find over curves, stall points and the sphere of radius R
    UnionFind uf;
    const int taint = uf.add();
    std::vector<std::vector<int>> node(rungs.size());
    std::vector<std::pair<Vec3q, int>> stalls;
    auto stall_node = [&](const Vec3q& x) {
        quad scale = quad(1e-3) * norm(x - a);
        for (const auto& [s, id] : stalls)
            if (norm(s - x) < scale) return id;
        int id = uf.add();
        stalls.push_back({x, id});
        return id;
    };
    auto curve_node = [&](std::size_t j, int c) {
        while (static_cast<int>(node[j].size()) <= c) node[j].push_back(uf.add());
        return node[j][c];
    };
    int failures = 0, flows = 0;
    for (std::size_t j = 0; j < rungs.size(); ++j) {
        // the set may grow while flows land on untraced curves
        for (int c = 0; c < static_cast<int>(sets[j]->curves().size()); ++c) {
            const int me = curve_node(j, c);
            const auto pts = sets[j]->curves()[c].points;
            const int k = std::min<int>(opt.flow_samples, static_cast<int>(pts.size()));
            for (int s = 0; s < k; ++s) {
                const Vec3q x = pts[(pts.size() * s) / k];
                for (int dir : {-1, 1}) {
                    if (dir > 0 && j + 1 == rungs.size()) continue;
                    quad target = dir > 0 ? quad(rungs[j + 1]) : (j == 0 ? quad(R) : quad(rungs[j - 1]));
                    auto fr = flow_on_level(f.q, a, delta, x, target);
                    ++flows;
                    if (fr.end == FlowEnd::failed) {
                        ++failures;
                        continue;
                    }
                    if (fr.end == FlowEnd::stalled) {
                        uf.unite(me, stall_node(fr.x));
                        continue;
                    }
                    if (dir < 0 && j == 0) {
                        uf.unite(me, taint);
                        continue;
                    }
                    std::size_t jt = dir > 0 ? j + 1 : j - 1;
                    int other = sets[jt]->locate_or_trace(fr.x);
                    uf.unite(me, curve_node(jt, other));
                }
            }
        }
    }
    for (const auto& s : sets)
        if (!s->ok()) {
            res.detail = "level curves on a ladder sphere were not fully traced";
            return res;
        }
    if (failures * 10 > flows) {
        res.detail = "level-set flow failed for " + std::to_string(failures) + " of " + std::to_string(flows) + " samples";
        return res;
    }
    bool tainted = uf.find(curve_node(0, p_curve)) == uf.find(taint);
    res.outcome = tainted ? Outcome::negative : Outcome::positive;
    res.detail = std::to_string(rungs.size()) + " ladder spheres";
    return res;
}

TestResult enlarged_radius_test(const FieldPair& f, const Center& center, const TangencyBranch& p, double lambda,
                                double R_prime, double R, const std::vector<CriticalPoint>& zeros_R,
                                const Tolerances& tol, const VanishingOptions& opt)
{
    const Vec3q a = center.as_quad();
    TestResult res;
    res.delta = to_double(p.base.value);
    res.radius_used = R_prime;
    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    // start from the last traced sample below R'
    Vec3q x0 = p.base.position;
    double r0 = R;
    for (const auto& s : p.samples)
        if (s.r <= R_prime) {
            x0 = s.x;
            r0 = s.r;
        }
    auto xp = continue_on_polar_curve(f.q, a, x0, quad(r0), quad(R_prime), copt);
    if (!xp) {
        res.detail = "branch continuation to R' failed";
        return res;
    }
    auto z = zeros_on_sphere(f, center, R_prime, zeros_R, R, tol, opt.depth);
    auto ext = extrema_of(z.zeros);
    SphereLevelSet at_delta(f, a, quad(R_prime), p.base.value, ext);
    SphereLevelSet at_lambda(f, a, quad(R_prime), quad(lambda), ext);
    const int omega = at_delta.region_of(*xp);
    at_lambda.regions();
    if (!at_delta.ok() || !at_lambda.ok() || omega < 0) {
        res.detail = "level curves on the enlarged sphere were not fully traced";
        return res;
    }
    bool meets = false;
    for (const auto& c : at_lambda.curves()) {
        if (c.points.empty()) continue;
        if (at_delta.region_of(c.points.front()) == omega) meets = true;
    }
    if (!at_delta.ok()) {
        res.detail = "region location on the enlarged sphere was inconsistent";
        return res;
    }
    res.outcome = meets ? Outcome::negative : Outcome::positive;
    res.detail = std::to_string(at_lambda.curves().size()) + " curves at lambda, " +
                 std::to_string(at_delta.curves().size()) + " at f(p)";
    return res;
}

VanishingReport detect_vanishing(const FieldPair& f, const Center& a, double lambda, const std::vector<int>& P_min,
                                 const std::vector<int>& P_max, const std::vector<TangencyBranch>& branches, double R,
                                 const std::vector<CriticalPoint>& zeros_R, const Tolerances& tol,
                                 const VanishingOptions& opt)
{
    VanishingReport rep;
    rep.lambda = lambda;
    if (!P_min.empty()) rep.sides.push_back("from-above");
    if (!P_max.empty()) rep.sides.push_back("from-below");
    bool any_positive = false, any_undetermined = false;
    auto run = [&](int id, const std::string& side) {
        const auto& p = branches[id];
        Witness w;
        w.branch = id;
        w.side = side;
        w.test = "isolated-intersection";
        w.result = isolated_intersection_test(f, a, p, branches, R, zeros_R, tol, opt);
        if (w.result.outcome != Outcome::positive) {
            auto crit = w.result.critical_radii;
            double top = std::max(R, 1.0);
            for (double c : crit) top = std::max(top, c);
            Witness e;
            e.branch = id;
            e.side = side;
            e.test = "enlarged-radius";
            e.result = enlarged_radius_test(f, a, p, lambda, 2 * top, R, zeros_R, tol, opt);
            e.result.critical_radii = crit;
            rep.witnesses.push_back(w);
            w = e;
        }
        if (w.result.outcome == Outcome::positive) any_positive = true;
        if (w.result.outcome == Outcome::undetermined) any_undetermined = true;
        rep.witnesses.push_back(w);
    };
    for (int id : P_min) run(id, "from-above");
    for (int id : P_max) run(id, "from-below");
    rep.verdict = any_positive        ? VanishingVerdict::vanishing
                  : any_undetermined ? VanishingVerdict::undetermined
                                     : VanishingVerdict::none;
    return rep;
}

nlohmann::json to_json(const VanishingReport& r)
{
    nlohmann::json w = nlohmann::json::array();
    for (const auto& x : r.witnesses)
        w.push_back({{"branch", x.branch},
                     {"side", x.side},
                     {"test", x.test},
                     {"outcome", to_string(x.result.outcome)},
                     {"delta", x.result.delta},
                     {"critical_radii", x.result.critical_radii},
                     {"radius_used", x.result.radius_used},
                     {"detail", x.result.detail}});
    return {{"lambda", r.lambda}, {"sides", r.sides}, {"witnesses", w}, {"verdict", to_string(r.verdict)}};
}

}  // namespace atlas
