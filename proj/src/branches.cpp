#include "atlas/branches.hpp"

#include <algorithm>
#include <cmath>

namespace atlas {

std::string to_string(Direction d)
{
    switch (d) {
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
    default: return "undetermined";
    }
}

std::string to_string(LimitKind k)
{
    switch (k) {
    case LimitKind::finite: return "finite";
    case LimitKind::plus_infinity: return "+inf";
    case LimitKind::minus_infinity: return "-inf";
    default: return "undetermined";
    }
}

namespace {

BranchSample make_sample(const FieldPair& f, const Vec3q& a, const quad& r, const Vec3q& x, const Tolerances& tol)
{
    CriticalPoint p = make_critical_point(f, a, r, x, tol);
    BranchSample s;
    s.r = to_double(r);
    s.x = x;
    s.value = p.value;
    // Tangent Hessian eigenvalues decay like a power of r along finite-limit
    // branches, so kinds past the base sphere are read from signs above the
    // quad rounding floor rather than from hess_tol.
    auto smp = f.q.sample(x);
    quad hnorm = 0;
    for (const auto& row : smp.hess)
        for (const auto& h : row) hnorm += abs(h);
    double floor = 1e-28 * to_double(hnorm + norm(smp.grad) / r);
    // |grad f| may legitimately drop below grad_tol here (asymptotic critical
    // values), so the singular-set flag is not consulted.
    s.kind = classify(p.tangent_hessian_eigenvalues.first, p.tangent_hessian_eigenvalues.second, floor);
    Vec3q d = x - a;
    s.sphere_residual = to_double(abs(dot(d, d) - r * r) / (r * r));
    return s;
}

}  // namespace

TangencyBranch trace_branch(const FieldPair& f, const Center& center, const CriticalPoint& p, double R,
                            const Tolerances& tol, const BranchOptions& opt)
{
    const Vec3q a = center.as_quad();
    TangencyBranch b;
    b.base = p;
    b.kind = p.kind;
    b.samples.push_back(make_sample(f, a, quad(R), p.position, tol));

    ContinuationOptions copt;
    copt.newton_tol = tol.newton_tol;
    const double r_max = opt.r_max_factor * R;
    Vec3q x = p.position;
    quad r = R;
    for (int k = 1;; ++k) {
        quad next = quad(R) * pow(quad(opt.growth), k);
        if (next > quad(r_max) * quad(1 + 1e-12)) break;
        auto y = continue_on_polar_curve(f.q, a, x, r, next, copt);
        if (!y) {
            b.lost = true;
            b.diagnostic = "continuation lost at r=" + std::to_string(to_double(next));
            break;
        }
        x = *y;
        r = next;
        b.samples.push_back(make_sample(f, a, r, x, tol));
    }

    const auto& s = b.samples;
    for (const auto& smp : s)
        if (smp.kind != b.kind) b.kind_constant = false;
    if (s.size() >= 2) {
        int sign = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            quad d = s[i].value - s[i - 1].value;
            int si = d > 0 ? 1 : (d < 0 ? -1 : 0);
            if (si == 0 || (sign != 0 && si != sign)) b.monotone = false;
            if (sign == 0) sign = si;
        }
        if (b.monotone) b.direction = sign > 0 ? Direction::increasing : Direction::decreasing;
    }
    estimate_limit(b, opt.divergence_threshold * (1 + f.coef_scale), opt.min_samples);
    return b;
}

LimitEstimate estimate_limit(const std::vector<double>& r, const std::vector<double>& v, double threshold,
                             int min_samples)
{
    LimitEstimate out;
    const int n = static_cast<int>(v.size());
    if (n < min_samples || n < 4) return out;

    const int first = std::max(0, n - std::max(4, n / 3));
    bool growing = true;
    for (int i = first + 1; i < n; ++i) growing = growing && std::abs(v[i]) > std::abs(v[i - 1]);
    if (std::abs(v[n - 1]) > threshold && growing) {
        out.kind = v[n - 1] > 0 ? LimitKind::plus_infinity : LimitKind::minus_infinity;
        out.error = 0;
        return out;
    }

    // log|d_k| against log r_k on the last third
    std::vector<double> lx, ly;
    for (int i = first; i + 1 < n; ++i) {
        double d = v[i + 1] - v[i];
        if (d == 0) {
            out.kind = LimitKind::finite;
            out.value = v[n - 1];
            out.error = 0;
            out.alpha = std::numeric_limits<double>::infinity();
            return out;
        }
        lx.push_back(std::log(r[i]));
        ly.push_back(std::log(std::abs(d)));
    }
    const int m = static_cast<int>(lx.size());
    double mx = 0, my = 0;
    for (int i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.alpha = -sxy / sxx;
    if (out.alpha <= 0.05) {
        double d = v[n - 1] - v[n - 2];
        out.kind = d > 0 ? LimitKind::plus_infinity : LimitKind::minus_infinity;
        out.error = 0;
        return out;
    }

    // geometric tail of the remaining increments
    auto extrapolate = [&](int last) {
        double ratio = r[last] / r[last - 1];
        double q = std::pow(ratio, -out.alpha);
        double d = v[last] - v[last - 1];
        return v[last] + d * q / (1 - q);
    };
    out.kind = LimitKind::finite;
    out.value = extrapolate(n - 1);
    out.error = std::max(std::abs(out.value - extrapolate(n - 2)), 1e-15 * (1 + std::abs(out.value)));
    return out;
}

void estimate_limit(TangencyBranch& b, double threshold, int min_samples)
{
    std::vector<double> r, v;
    for (const auto& s : b.samples) {
        r.push_back(s.r);
        v.push_back(to_double(s.value));
    }
    auto e = estimate_limit(r, v, threshold, min_samples);
    b.limit_kind = e.kind;
    b.limit = e.kind == LimitKind::plus_infinity    ? std::numeric_limits<double>::infinity()
              : e.kind == LimitKind::minus_infinity ? -std::numeric_limits<double>::infinity()
                                                    : e.value;
    b.limit_error = e.error;
    b.decay_exponent = e.alpha;
    if (e.kind == LimitKind::undetermined && b.diagnostic.empty()) b.diagnostic = "too few samples for a limit";
}

std::vector<TangencyBranch> trace_branches(const FieldPair& f, const Center& a, const std::vector<CriticalPoint>& zeros,
                                           double R, const Tolerances& tol, const BranchOptions& opt)
{
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(zeros.size()); ++i)
        if (!zeros[i].in_singular_set) idx.push_back(i);
    std::vector<TangencyBranch> out(idx.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < static_cast<int>(idx.size()); ++k) {
        out[k] = trace_branch(f, a, zeros[idx[k]], R, tol, opt);
        out[k].id = k;
    }
    return out;
}

std::vector<Candidate> collect_candidates(const std::vector<TangencyBranch>& branches, const std::vector<double>& K0,
                                          const Tolerances& tol)
{
    std::vector<const TangencyBranch*> finite;
    for (const auto& b : branches)
        if (b.finite_limit()) finite.push_back(&b);
    std::sort(finite.begin(), finite.end(), [](auto* x, auto* y) { return x->limit < y->limit; });

    auto ctol = [&](double l) { return tol.lambda_cluster_tol * (1 + std::abs(l)); };
    std::vector<Candidate> out;
    double anchor = 0;
    for (const auto* b : finite) {
        if (out.empty() || b->limit - anchor > ctol(anchor)) {
            out.push_back({});
            anchor = b->limit;
        }
        out.back().members.push_back(b->id);
    }
    for (auto& c : out) {
        double sum = 0, err = 0;
        for (int id : c.members) {
            const auto& b = branches[id];
            sum += b.limit;
            err = std::max(err, b.limit_error);
        }
        c.lambda = sum / c.members.size();
        c.error = err;
        for (double k : K0)
            if (std::abs(k - c.lambda) <= ctol(c.lambda)) c.collides_with_K0 = true;
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].lambda - out[i - 1].lambda < 3 * ctol(out[i - 1].lambda))
            throw AmbiguousClusteringError("branch limits " + std::to_string(out[i - 1].lambda) + " and " +
                                           std::to_string(out[i].lambda) + " are within three cluster tolerances");
    return out;
}

bool branches_merge(const std::vector<TangencyBranch>& branches, const Tolerances& tol)
{
    for (std::size_t i = 0; i < branches.size(); ++i)
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            const auto& a = branches[i].samples;
            const auto& b = branches[j].samples;
            for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
                if (to_double(norm(a[k].x - b[k].x)) < tol.dedup_tol) return true;  // same radius, absolute gap
        }
    return false;
}

nlohmann::json to_json(const TangencyBranch& b, bool with_samples)
{
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        if (std::isnan(v)) return nullptr;
        return v > 0 ? "+inf" : "-inf";
    };
    nlohmann::json j = {{"id", b.id},
                        {"base", to_json(b.base)},
                        {"kind", to_string(b.kind)},
                        {"direction", to_string(b.direction)},
                        {"limit_kind", to_string(b.limit_kind)},
                        {"limit", num(b.limit)},
                        {"limit_error", num(b.limit_error)},
                        {"decay_exponent", num(b.decay_exponent)},
                        {"samples", b.samples.size()},
                        {"monotone", b.monotone},
                        {"kind_constant", b.kind_constant},
                        {"lost", b.lost}};
    if (!b.diagnostic.empty()) j["diagnostic"] = b.diagnostic;
    if (with_samples) j["polyline"] = branches_to_json({b})[0]["polyline"];
    return j;
}

nlohmann::json branches_to_json(const std::vector<TangencyBranch>& branches)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& b : branches) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& s : b.samples) {
            Vec3d x = to_double(s.x);
            pts.push_back({s.r, x.x, x.y, x.z, to_double(s.value)});
        }
        out.push_back({{"id", b.id}, {"kind", to_string(b.kind)}, {"polyline", pts}});
    }
    return out;
}

}  // namespace atlas
