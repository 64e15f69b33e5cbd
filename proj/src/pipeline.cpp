#include "atlas/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "atlas/index_calculus.hpp"

namespace atlas {

std::string to_string(Status s)
{
    switch (s) {
    case Status::typical: return "typical";
    case Status::atypical: return "atypical";
    case Status::undetermined: return "undetermined";
    case Status::collides_with_K0: return "collides_with_K0";
    }
    return "undetermined";
}

std::string to_string(Tri t)
{
    switch (t) {
    case Tri::yes: return "true";
    case Tri::no: return "false";
    case Tri::undetermined: return "undetermined";
    }
    return "undetermined";
}

std::vector<double> Report::atypical_values() const
{
    std::vector<double> out;
    for (const auto& v : verdicts)
        if (v.status == Status::atypical) out.push_back(v.lambda());
    return out;
}

namespace {

bool close_values(double a, double b, const Tolerances& tol)
{
    return std::abs(a - b) < tol.lambda_cluster_tol * (1 + std::abs(a));
}

struct SphereState {
    double R = 0;
    ZeroSearchResult zeros;
    std::vector<TangencyBranch> branches;
};

SphereState sphere_at(const FieldPair& f, const Center& c, double R, const ZeroSearchResult* from, double from_R,
                      const PipelineConfig& cfg)
{
    SphereState s;
    s.R = R;
    std::vector<Vec3q> seeds;
    if (from) seeds = continue_zeros(f, c, from->zeros, from_R, R, cfg.tol);
    s.zeros = find_sphere_zeros_audited(f, c, quad(R), cfg.depth, std::min(cfg.depth + 2, kMaxMeshDepth), cfg.tol,
                                        seeds);
    return s;
}

void require_audit(const ZeroSearchResult& z, double R)
{
    if (!z.audit_ok)
        throw ResourceCapError("refinement cap reached on the sphere of radius " + std::to_string(R) +
                               ": index sum " + std::to_string(z.index_sum) + ", unresolved faces " +
                               std::to_string(z.unresolved_faces));
}

bool has_degenerate(const ZeroSearchResult& z)
{
    for (const auto& p : z.zeros)
        if (!p.in_singular_set && p.kind == Kind::degenerate) return true;
    return false;
}

std::vector<Candidate> candidates_for(const std::vector<TangencyBranch>& branches, const std::vector<double>& K0,
                                      const std::vector<double>& queries, const Tolerances& tol)
{
    auto cands = collect_candidates(branches, K0, tol);
    auto known = [&](double v) {
        for (const auto& c : cands)
            if (close_values(c.lambda, v, tol)) return true;
        return false;
    };
    auto in_K0 = [&](double v) {
        for (double k : K0)
            if (close_values(k, v, tol)) return true;
        return false;
    };
    for (double k : K0) {
        if (known(k)) continue;
        Candidate c;
        c.lambda = k;
        c.collides_with_K0 = true;
        cands.push_back(c);
    }
    for (double q : queries) {
        if (known(q)) continue;
        Candidate c;
        c.lambda = q;
        c.collides_with_K0 = in_K0(q);
        cands.push_back(c);
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
    return cands;
}

// Number of f = lambda circles on the spheres R, 2R, 4R; equal counts are
// needed for every face of the level set to reach the sphere.
bool circles_stable(const FieldPair& f, const Center& c, double lambda, const SphereState& s, const PipelineConfig& cfg)
{
    const Vec3q a = c.as_quad();
    SphereLevelSet base(f, a, quad(s.R), quad(lambda), extrema_of(s.zeros.zeros));
    if (!base.ok()) return false;
    const std::size_t n0 = base.circle_count();
    for (double k : {2.0, 4.0}) {
        double rho = k * s.R;
        auto z = zeros_on_sphere(f, c, rho, s.zeros.zeros, s.R, cfg.tol, cfg.depth);
        SphereLevelSet ls(f, a, quad(rho), quad(lambda), extrema_of(z.zeros));
        if (!ls.ok() || ls.circle_count() != n0) return false;
    }
    return true;
}

void assign_status(Verdict& v)
{
    bool nonzero = false, all_resolved = v.level_set_ok;
    for (const auto& r : v.regions) {
        if (!r.indices_resolved) all_resolved = false;
        else if (r.index_sum != 0) nonzero = true;
    }
    if (!v.level_set_ok) v.undetermined_parts.push_back("level-set decomposition");
    for (const auto& r : v.regions)
        if (!r.indices_resolved) v.undetermined_parts.push_back("index of a branch point in region " + std::to_string(r.region));
    const auto van = v.vanishing ? v.vanishing->verdict : VanishingVerdict::undetermined;
    if (van == VanishingVerdict::undetermined) v.undetermined_parts.push_back("vanishing detection");

    if (nonzero && v.level_set_ok) {
        v.status = Status::atypical;
        v.rationale = "some region carries a nonzero index sum";
    } else if (van == VanishingVerdict::vanishing) {
        v.status = Status::atypical;
        v.rationale = all_resolved ? "index sums all vanish but a vanishing component exists, so the fibration "
                                     "criterion fails at its first condition"
                                   : "a vanishing component exists";
    } else if (all_resolved && van == VanishingVerdict::none) {
        v.status = Status::typical;
        v.rationale = "every region has index sum 0 and no vanishing component exists";
        v.undetermined_parts.clear();
    } else {
        v.status = Status::undetermined;
        v.rationale = "no certificate either way";
    }
    if (v.status != Status::undetermined) v.undetermined_parts.clear();
}

Verdict analyze_candidate(const FieldPair& f, const Center& c, const SphereState& s, const Candidate& cd,
                          const std::vector<int>& P_min, const std::vector<int>& P_max, const PipelineConfig& cfg)
{
    Verdict v;
    v.candidate = cd;
    if (cd.collides_with_K0) {
        v.status = Status::collides_with_K0;
        v.rationale = "value lies in the K0 estimate, outside the hypotheses; reported without classification";
        return v;
    }
    const Vec3q a = c.as_quad();
    const double lambda = cd.lambda;
    SphereLevelSet ls(f, a, quad(s.R), quad(lambda), extrema_of(s.zeros.zeros));
    const auto& regions = ls.regions();
    v.circle_count = static_cast<int>(ls.circle_count());
    v.level_set_ok = ls.ok();

    std::vector<std::vector<int>> members(regions.size());
    for (int m : cd.members) {
        int r = ls.region_of(s.branches[m].base.position);
        if (r >= 0 && r < static_cast<int>(members.size())) members[r].push_back(m);
        else v.level_set_ok = false;
    }
    for (const auto& reg : regions) {
        RegionEvidence e;
        e.region = reg.id;
        e.sign = reg.sign;
        e.boundary_circles = reg.boundary_circle_count;
        e.members = members[reg.id];
        std::vector<CriticalPoint> pts;
        for (int m : e.members) {
            pts.push_back(s.branches[m].base);
            if (s.branches[m].base.index_method == "unresolved") e.indices_resolved = false;
        }
        e.index_sum = region_index_sum(pts);
        v.regions.push_back(std::move(e));
    }

    VanishingOptions vopt;
    vopt.depth = cfg.depth;
    v.vanishing = detect_vanishing(f, c, lambda, P_min, P_max, s.branches, s.R, s.zeros.zeros, cfg.tol, vopt);
    assign_status(v);

    if (cfg.oracle) {
        for (auto& e : v.regions) {
            if (e.sign == 0) continue;
            double t = lambda + e.sign * cfg.oracle_offset;
            auto cr = distance_critical_values_on_level(f, c, t, s.branches, s.R, cfg.tol);
            double rmax = s.R;
            for (double r : cr.radii) rmax = std::max(rmax, r);
            e.t = t;
            e.R_prime = std::max(4 * s.R, 2 * rmax);
            e.euler = euler_outside_ball(f, t, ls, e.region, e.R_prime, s.branches, cfg.oracle_cfg);
            if (!e.euler || *e.euler != e.index_sum) v.euler_agrees = false;
        }
        v.conditions = check_fibration_conditions(f, lambda, *v.vanishing, cfg.oracle_offset, c.as_double(), s.R,
                                                  cfg.oracle_cfg);
        auto schedule = sweep_schedule(lambda, {-1, 1}, 1, cfg.sweep_k_max);
        v.sweep = min_fiber_distance_sweep(f, schedule, c.as_double(), s.R, Box::cube(c.as_double(), 16 * s.R),
                                           cfg.oracle_cfg);
    }
    return v;
}

}  // namespace

FibrationConditions check_fibration_conditions(const FieldPair& f, double lambda, const VanishingReport& vanishing,
                                               double D_radius, const Vec3d& a, double R, const OracleConfig& cfg)
{
    FibrationConditions out;
    switch (vanishing.verdict) {
    case VanishingVerdict::none: out.no_vanishing = Tri::yes; break;
    case VanishingVerdict::vanishing: out.no_vanishing = Tri::no; break;
    case VanishingVerdict::undetermined: out.no_vanishing = Tri::undetermined; break;
    }
    const Box box = Box::cube(a, 16 * R);
    for (double k : {1.0, 0.1})
        for (int sgn : {-1, 1}) out.t_samples.push_back(lambda + sgn * k * D_radius);

    bool compact = false;
    for (double t : out.t_samples) compact = compact || compact_component_test(f, t, a, R, box, cfg);
    out.no_compact_component = compact ? Tri::no : Tri::yes;

    out.chi_at_lambda = extract_fiber(f, lambda, box, a, R, cfg).chi_total();
    bool same = true;
    for (double t : out.t_samples) {
        int chi = extract_fiber(f, t, box, a, R, cfg).chi_total();
        out.chi_at_samples.push_back(chi);
        same = same && chi == out.chi_at_lambda;
    }
    out.euler_constant = same ? Tri::yes : Tri::no;
    return out;
}

Report analyze(const Polynomial& poly, const PipelineConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    if (poly.is_constant()) throw std::invalid_argument("constant polynomial");
    FieldPair f(poly);
    Report rep;
    rep.polynomial = poly;
    rep.depth = cfg.depth;
    rep.tol = cfg.tol;

    RadiusOptions ropt;
    ropt.depth = cfg.depth;
    ropt.max_depth = std::min(cfg.depth + 2, kMaxMeshDepth);

    std::optional<SphereState> state;
    Center c;
    for (int draw = 0; draw <= cfg.max_center_draws && !state; ++draw) {
        c = choose_generic_center(poly, cfg.seed + 0x2545F4914F6CDD1Dull * static_cast<std::uint64_t>(draw));
        auto rc = choose_radius(f, c, {}, cfg.r0, cfg.tol, ropt);
        SphereState s;
        if (cfg.radius_scale == 1) {
            s.R = rc.R;
            s.zeros = std::move(rc.zeros);
        } else {
            s = sphere_at(f, c, rc.R * cfg.radius_scale, &rc.zeros, rc.R, cfg);
        }
        require_audit(s.zeros, s.R);
        rep.center_draws = draw + 1;
        if (has_degenerate(s.zeros)) {
            rep.notes.push_back("center drawn with seed " + std::to_string(c.seed) +
                                " has a degenerate zero on the chosen sphere; redrawn");
            continue;
        }
        rep.radius = rc.diagnostics;
        state = std::move(s);
    }
    if (!state) throw GenericityError("no generic center within " + std::to_string(cfg.max_center_draws) + " redraws");
    rep.center = c;

    const Vec3d ad = c.as_double();
    state->branches = trace_branches(f, c, state->zeros.zeros, state->R, cfg.tol);
    rep.K0 = compute_K0(f, Box::cube(ad, 16 * state->R), cfg.tol);
    auto cands = candidates_for(state->branches, rep.K0, cfg.lambdas, cfg.tol);

    // Enlarge R until the level circles of every candidate are stable.
    for (int k = 0;; ++k) {
        bool stable = true;
        for (const auto& cd : cands)
            if (!cd.collides_with_K0 && !circles_stable(f, c, cd.lambda, *state, cfg)) stable = false;
        if (stable) break;
        if (k == cfg.max_circle_doublings) {
            rep.notes.push_back("level circle count not stable within the doubling budget");
            break;
        }
        double R2 = 2 * state->R;
        SphereState next = sphere_at(f, c, R2, &state->zeros, state->R, cfg);
        require_audit(next.zeros, R2);
        next.branches = trace_branches(f, c, next.zeros.zeros, R2, cfg.tol);
        state = std::move(next);
        cands = candidates_for(state->branches, rep.K0, cfg.lambdas, cfg.tol);
        ++rep.circle_doublings;
    }
    rep.R = state->R;
    rep.radius.chosen_R = state->R;
    for (const auto& cd : cands)
        for (const auto& p : state->zeros.zeros)
            if (!p.in_singular_set && close_values(cd.lambda, to_double(p.value), cfg.tol))
                rep.radius.level_transversality = false;

    auto lists = build_candidate_lists(state->branches, cands);
    std::vector<std::vector<int>> pmin(cands.size()), pmax(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (auto it = lists.P_min.find(static_cast<int>(i)); it != lists.P_min.end()) pmin[i] = it->second;
        if (auto it = lists.P_max.find(static_cast<int>(i)); it != lists.P_max.end()) pmax[i] = it->second;
    }
    rep.verdicts.resize(cands.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        try {
            rep.verdicts[i] = analyze_candidate(f, c, *state, cands[i], pmin[i], pmax[i], cfg);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    rep.branches = std::move(state->branches);
    rep.zeros = std::move(state->zeros);
    if (rep.atypical_values().empty()) rep.notes.push_back("no atypical values at infinity detected");
    if (!rep.radius.caveat.empty()) rep.notes.push_back(rep.radius.caveat);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace atlas
