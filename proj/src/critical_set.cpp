#include "atlas/critical_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "atlas/index_calculus.hpp"

namespace atlas {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double d)
{
    while (d > kPi) d -= 2 * kPi;
    while (d < -kPi) d += 2 * kPi;
    return d;
}

struct Frame {
    Vec3q n, e1, e2;
};

Frame frame_at(const Vec3q& n)
{
    auto [e1, e2] = tangent_frame(n);
    return {n, e1, e2};
}

// Winding bookkeeping over one cell. Edge increments above a quarter turn are
// resolved by sampling the field in quad along the great arc.
class WindingCounter {
public:
    WindingCounter(const PolyField<quad>& f, const Vec3q& a, const quad& r, int max_depth)
        : f_(f), a_(a), r_(r), max_depth_(max_depth)
    {
    }

    Vec3q field(const Vec3q& u) const
    {
        auto s = f_.sample(a_ + u * r_, false);
        return tangential(s.grad, u);
    }

    double angle(const Frame& fr, const Vec3q& v) const
    {
        return std::atan2(to_double(dot(v, fr.e2)), to_double(dot(v, fr.e1)));
    }

    double edge(const Frame& fr, const Vec3q& u0, const Vec3q& u1, const Vec3q& x0, const Vec3q& x1, int depth)
    {
        double d = wrap_angle(angle(fr, x1) - angle(fr, x0));
        if (std::abs(d) < kPi / 2) return d;
        if (depth >= max_depth_) {
            ++unresolved;
            return d;
        }
        Vec3q um = normalized(u0 + u1);
        Vec3q xm = field(um);
        return edge(fr, u0, um, x0, xm, depth + 1) + edge(fr, um, u1, xm, x1, depth + 1);
    }

    // Winding of X around the spherical triangle (u0,u1,u2), counterclockwise
    // seen from outside.
    int cell(const std::array<Vec3q, 3>& u, const std::array<Vec3q, 3>& x)
    {
        Vec3q c = normalized(u[0] + u[1] + u[2]);
        Frame fr = frame_at(c);
        double total = 0;
        for (int k = 0; k < 3; ++k) total += edge(fr, u[k], u[(k + 1) % 3], x[k], x[(k + 1) % 3], 0);
        int orient = dot(cross(u[1] - u[0], u[2] - u[0]), c) > 0 ? 1 : -1;
        return orient * static_cast<int>(std::lround(total / (2 * kPi)));
    }

    int unresolved = 0;

private:
    const PolyField<quad>& f_;
    Vec3q a_;
    quad r_;
    int max_depth_;
};

bool inside_triangle(const std::array<Vec3q, 3>& u, const Vec3q& p)
{
    Vec3q c = u[0] + u[1] + u[2];
    int orient = dot(cross(u[1] - u[0], u[2] - u[0]), c) > 0 ? 1 : -1;
    for (int k = 0; k < 3; ++k) {
        quad s = dot(cross(u[k], u[(k + 1) % 3]), p) * orient;
        if (s < 0) return false;
    }
    return dot(p, c) > 0;
}

int kind_index(Kind k)
{
    switch (k) {
    case Kind::min:
    case Kind::max: return 1;
    case Kind::saddle: return -1;
    default: return 0;
    }
}

}  // namespace

nlohmann::json to_json(const CriticalPoint& p)
{
    Vec3d x = to_double(p.position);
    return {{"position", {x.x, x.y, x.z}},
            {"radius", p.radius},
            {"value", to_double(p.value)},
            {"kind", to_string(p.kind)},
            {"in_singular_set", p.in_singular_set},
            {"index", p.index},
            {"index_method", p.index_method},
            {"tangent_hessian_eigenvalues", {p.tangent_hessian_eigenvalues.first, p.tangent_hessian_eigenvalues.second}}};
}

CriticalPoint make_critical_point(const FieldPair& f, const Vec3q& a, const quad& r, const Vec3q& x,
                                  const Tolerances& tol)
{
    CriticalPoint p;
    p.position = x;
    p.radius = to_double(r);
    auto s = f.q.sample(x);
    p.value = s.f;
    Vec3q n = normalized(x - a);
    double gnorm = to_double(norm(s.grad));
    p.tangential_residual = to_double(norm(tangential(s.grad, n)));
    p.in_singular_set = gnorm < tol.grad_tol_base * (1 + f.coef_scale);
    auto [l1, l2] = tangent_hessian_eigenvalues(s, n, r);
    p.tangent_hessian_eigenvalues = {to_double(l1), to_double(l2)};
    p.kind = classify(to_double(l1), to_double(l2), tol.hess_tol);
    if (p.in_singular_set) p.kind = Kind::degenerate;
    p.index = kind_index(p.kind);
    p.index_method = "hessian-sign";
    return p;
}

ZeroSearchResult find_sphere_zeros(const FieldPair& f, const Center& center, const quad& r, const SphereMesh& mesh,
                                   const Tolerances& tol, const std::vector<Vec3q>& extra_seeds,
                                   const ZeroSearchOptions& opt)
{
    const Vec3q a = center.as_quad();
    const quad edge_len = quad(mesh.mean_edge_length()) * r / quad(mesh.radius);
    const quad dedup = quad(tol.dedup_tol) * (r > 1 ? r : quad(1));
    const std::size_t nv = mesh.unit.size();

    // Vertex field in quad: the tangential part cancels heavily at large radii.
    WindingCounter wc(f.q, a, r, opt.max_edge_subdivision);
    std::vector<Vec3q> U(nv), X(nv);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nv; ++i) {
        Vec3d u = mesh.unit[i];
        U[i] = normalized(Vec3q(u.x, u.y, u.z));
        X[i] = wc.field(U[i]);
    }

    ZeroSearchResult res;
    std::vector<int> face_winding(mesh.faces.size());
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& t = mesh.faces[fi];
        face_winding[fi] = wc.cell({U[t[0]], U[t[1]], U[t[2]]}, {X[t[0]], X[t[1]], X[t[2]]});
        res.mesh_winding_total += face_winding[fi];
    }

    std::vector<Vec3q> found;
    auto try_seed = [&](const Vec3q& u, const quad& max_step) {
        auto z = refine_sphere_zero(f.q, a, r, a + u * r, max_step, tol.newton_tol);
        if (!z) return;
        for (const auto& y : found)
            if (norm(y - z->x) < dedup) return;
        found.push_back(z->x);
    };

    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        if (face_winding[fi] == 0) continue;
        const auto& t = mesh.faces[fi];
        try_seed(normalized(U[t[0]] + U[t[1]] + U[t[2]]), edge_len * 2);
    }
    if (opt.vertex_minima_seeds) {
        std::vector<double> mag(nv);
        for (std::size_t i = 0; i < nv; ++i) mag[i] = to_double(norm(X[i]));
        for (std::size_t i = 0; i < nv; ++i) {
            bool local_min = true;
            for (int j : mesh.vertex_neighbors[i])
                if (mag[j] < mag[i]) {
                    local_min = false;
                    break;
                }
            if (local_min) try_seed(U[i], edge_len * 2);
        }
    }
    for (const auto& s : extra_seeds) try_seed(normalized(s - a), edge_len * 4);

    auto indexed = [&](const Vec3q& x) {
        CriticalPoint p = make_critical_point(f, a, r, x, tol);
        if (p.kind == Kind::degenerate) {
            IndexedZero iz = point_index(f, a, p, tol);
            p.index = iz.index;
            p.index_method = iz.method;
        }
        return p;
    };

    std::vector<CriticalPoint> zeros;
    for (const auto& x : found) zeros.push_back(indexed(x));

    // Each nonzero-winding face must hold zeros of matching total index;
    // otherwise split it and seed from the children.
    std::function<void(const std::array<Vec3q, 3>&, int, int)> account = [&](const std::array<Vec3q, 3>& u,
                                                                               int winding, int depth) {
        int sum = 0;
        for (const auto& p : zeros)
            if (inside_triangle(u, normalized(p.position - a))) sum += p.index;
        if (sum == winding) return;
        if (depth >= opt.max_face_subdivision) {
            ++res.unresolved_faces;
            return;
        }
        std::array<Vec3q, 3> m = {normalized(u[0] + u[1]), normalized(u[1] + u[2]), normalized(u[2] + u[0])};
        std::array<std::array<Vec3q, 3>, 4> kids = {{{u[0], m[0], m[2]}, {m[0], u[1], m[1]}, {m[2], m[1], u[2]},
                                                     {m[0], m[1], m[2]}}};
        quad child_len = norm(m[0] - m[1]) * r;
        for (const auto& k : kids) {
            std::array<Vec3q, 3> xk = {wc.field(k[0]), wc.field(k[1]), wc.field(k[2])};
            int w = wc.cell(k, xk);
            std::size_t before = found.size();
            if (w != 0) try_seed(normalized(k[0] + k[1] + k[2]), child_len);
            for (std::size_t i = before; i < found.size(); ++i) zeros.push_back(indexed(found[i]));
            account(k, w, depth + 1);
        }
    };
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        if (face_winding[fi] == 0) continue;
        const auto& t = mesh.faces[fi];
        account({U[t[0]], U[t[1]], U[t[2]]}, face_winding[fi], 0);
    }

    res.unresolved_edges = wc.unresolved;
    res.zeros = std::move(zeros);
    res.index_sum = 0;
    for (const auto& p : res.zeros) res.index_sum += p.index;
    res.audit_ok = poincare_hopf_audit(res.zeros) && res.unresolved_faces == 0;
    return res;
}

ZeroSearchResult find_sphere_zeros_audited(const FieldPair& f, const Center& a, const quad& r, int depth,
                                           int max_depth, const Tolerances& tol,
                                           const std::vector<Vec3q>& extra_seeds)
{
    ZeroSearchResult res;
    for (int d = depth; d <= max_depth; ++d) {
        SphereMesh mesh = build_mesh(a.as_double(), to_double(r), d);
        res = find_sphere_zeros(f, a, r, mesh, tol, extra_seeds);
        if (res.audit_ok) return res;
    }
    return res;
}

Center draw_center(std::uint64_t seed)
{
    // rationals k / 2^16 with k uniform in [-2^16, 2^16]
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-65536, 65536);
    Center c;
    c.seed = seed;
    for (int i = 0; i < 3; ++i) c.a[i] = Rational(dist(rng), 65536);
    return c;
}

bool minors_vanish_identically(const Polynomial& f, const Center& a)
{
    auto m = polar_minors(f, a);
    return m[0].is_zero() && m[1].is_zero() && m[2].is_zero();
}

Center choose_generic_center(const Polynomial& f, std::uint64_t seed)
{
    for (int attempt = 0; attempt <= 8; ++attempt) {
        Center c = draw_center(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(attempt));
        if (!minors_vanish_identically(f, c)) return c;
    }
    throw GenericityError("polar minors vanish identically for every drawn center");
}

bool validate_center(const FieldPair& f, const Center& a, const std::vector<double>& sample_radii,
                     const Tolerances& tol, int depth)
{
    for (double r : sample_radii) {
        auto res = find_sphere_zeros_audited(f, a, quad(r), depth, depth + 2, tol);
        if (!res.audit_ok) return false;
        for (const auto& p : res.zeros)
            if (!p.in_singular_set && p.kind == Kind::degenerate) return false;
    }
    return true;
}

std::vector<int> match_zeros_across_radii(const FieldPair& f, const Center& center,
                                          const std::vector<CriticalPoint>& from, double r0,
                                          const std::vector<CriticalPoint>& found, double r1, const Tolerances& tol)
{
    const Vec3q a = center.as_quad();
    std::vector<int> out(from.size(), -1);
    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    const quad close = quad(1e-6) * quad(std::max(1.0, r1));
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (from[i].in_singular_set) continue;
        auto y = continue_on_polar_curve(f.q, a, from[i].position, quad(r0), quad(r1), copt);
        if (!y) continue;
        quad best = close;
        for (std::size_t j = 0; j < found.size(); ++j) {
            quad d = norm(found[j].position - *y);
            if (d < best) {
                best = d;
                out[i] = static_cast<int>(j);
            }
        }
    }
    return out;
}

std::vector<Vec3q> continue_zeros(const FieldPair& f, const Center& center, const std::vector<CriticalPoint>& from,
                                  double r0, double r1, const Tolerances& tol)
{
    const Vec3q a = center.as_quad();
    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    std::vector<Vec3q> out;
    for (const auto& p : from) {
        if (auto y = continue_on_polar_curve(f.q, a, p.position, quad(r0), quad(r1), copt)) out.push_back(*y);
    }
    return out;
}

nlohmann::json to_json(const RadiusDiagnostics& d)
{
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& s : d.branch_count_history)
        hist.push_back({{"radius", s.radius},
                        {"nonsingular_zeros", s.nonsingular_zeros},
                        {"singular_zeros", s.singular_zeros},
                        {"audit_ok", s.audit_ok},
                        {"kinds_matched", s.kinds_matched},
                        {"refinement_step", s.refinement_step}});
    nlohmann::json j = {{"chosen_R", d.chosen_R},
                        {"branch_count_history", hist},
                        {"property_P_stable", d.property_P_stable},
                        {"kinds_stable", d.kinds_stable},
                        {"value_interval_disjointness", d.value_interval_disjointness},
                        {"level_transversality", d.level_transversality}};
    if (!d.caveat.empty()) j["caveat"] = d.caveat;
    return j;
}

namespace {

struct Signature {
    int nonsingular = 0;
    std::map<Kind, int> kinds;
    bool operator==(const Signature& o) const { return nonsingular == o.nonsingular && kinds == o.kinds; }
};

Signature signature(const ZeroSearchResult& z)
{
    Signature s;
    for (const auto& p : z.zeros) {
        if (p.in_singular_set) continue;
        ++s.nonsingular;
        ++s.kinds[p.kind];
    }
    return s;
}

RadiusSample sample_of(double r, const ZeroSearchResult& z)
{
    RadiusSample s;
    s.radius = r;
    s.audit_ok = z.audit_ok;
    for (const auto& p : z.zeros) (p.in_singular_set ? s.singular_zeros : s.nonsingular_zeros)++;
    return s;
}

}  // namespace

RadiusChoice choose_radius(const FieldPair& f, const Center& a, const std::vector<double>& candidates, double R0,
                           const Tolerances& tol, const RadiusOptions& opt)
{
    RadiusChoice out;
    auto& diag = out.diagnostics;
    std::vector<double> radii;
    std::vector<ZeroSearchResult> results;
    std::vector<Signature> sigs;

    int stable_from = -1;
    double r = R0;
    for (int k = 0; k <= opt.max_doublings + opt.stable_steps; ++k, r *= opt.growth) {
        // zeros carried from the previous sphere catch pairs finer than the mesh
        std::vector<Vec3q> seeds;
        if (!results.empty()) seeds = continue_zeros(f, a, results.back().zeros, radii.back(), r, tol);
        auto z = find_sphere_zeros_audited(f, a, quad(r), opt.depth, opt.max_depth, tol, seeds);
        radii.push_back(r);
        sigs.push_back(signature(z));
        diag.branch_count_history.push_back(sample_of(r, z));
        results.push_back(std::move(z));
        int n = static_cast<int>(radii.size());
        if (n >= opt.stable_steps) {
            bool stable = results[n - opt.stable_steps].audit_ok;
            for (int j = n - opt.stable_steps + 1; j < n; ++j)
                stable = stable && sigs[j] == sigs[j - 1] && results[j].audit_ok;
            if (stable) {
                stable_from = n - opt.stable_steps;
                break;
            }
        }
    }
    if (stable_from < 0) {
        stable_from = static_cast<int>(radii.size()) - 1;
        diag.property_P_stable = false;
        diag.caveat = "zero count did not stabilise within the doubling budget";
    } else {
        diag.property_P_stable = true;
    }

    // Kinds must be carried along the polar branches across the stable window.
    diag.kinds_stable = true;
    for (int j = stable_from; j + 1 < static_cast<int>(radii.size()); ++j) {
        const auto& zf = results[j].zeros;
        const auto& zt = results[j + 1].zeros;
        auto m = match_zeros_across_radii(f, a, zf, radii[j], zt, radii[j + 1], tol);
        bool ok = true;
        for (std::size_t i = 0; i < zf.size(); ++i) {
            if (zf[i].in_singular_set) continue;
            ok = ok && m[i] >= 0 && zt[m[i]].kind == zf[i].kind;
        }
        diag.branch_count_history[j + 1].kinds_matched = ok;
        diag.kinds_stable = diag.kinds_stable && ok;
    }

    double chosen = radii[stable_from];
    ZeroSearchResult chosen_zeros = results[stable_from];
    if (diag.property_P_stable && stable_from > 0) {
        double lo = radii[stable_from - 1], hi = chosen;
        const Signature target = sigs[stable_from];
        for (int b = 0; b < opt.refine_bisections; ++b) {
            double mid = 0.5 * (lo + hi);
            auto seeds = continue_zeros(f, a, chosen_zeros.zeros, hi, mid, tol);
            auto z = find_sphere_zeros_audited(f, a, quad(mid), opt.depth, opt.max_depth, tol, seeds);
            auto s = sample_of(mid, z);
            s.refinement_step = true;
            bool same = z.audit_ok && signature(z) == target;
            if (same) {
                auto m = match_zeros_across_radii(f, a, z.zeros, mid, chosen_zeros.zeros, hi, tol);
                for (std::size_t i = 0; i < z.zeros.size(); ++i)
                    if (!z.zeros[i].in_singular_set)
                        same = same && m[i] >= 0 && chosen_zeros.zeros[m[i]].kind == z.zeros[i].kind;
                s.kinds_matched = same;
            }
            diag.branch_count_history.push_back(s);
            if (same) {
                hi = mid;
                chosen_zeros = std::move(z);
            } else {
                lo = mid;
            }
        }
        chosen = hi;
    }

    for (double lam : candidates) {
        double ctol = tol.lambda_cluster_tol * (1 + std::abs(lam));
        for (const auto& p : chosen_zeros.zeros)
            if (!p.in_singular_set && std::abs(to_double(p.value) - lam) < ctol) diag.level_transversality = false;
    }

    diag.chosen_R = chosen;
    out.R = chosen;
    out.zeros = std::move(chosen_zeros);
    return out;
}

}  // namespace atlas
