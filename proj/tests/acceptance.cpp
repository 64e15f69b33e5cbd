// End-to-end acceptance checks. One PASS/FAIL line per criterion; details
// follow on indented lines. Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "atlas/index_calculus.hpp"
#include "atlas/pipeline.hpp"

using namespace atlas;

namespace {

const char* kQuintic = "2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y";
const char* kValley = "x^2*y^3*(y^2-25)^2 + 2*x*y*(y^2-25)*(y+25) - y^4 - y^3 + 50*y^2 + 51*y - 575";
const char* kIntro = "x*(x*y+1)";

int failures = 0;

struct Line {
    std::vector<std::string> details;
    bool ok = true;

    void need(bool cond, const std::string& what)
    {
        details.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
        ok = ok && cond;
    }
};

void report(int n, const std::string& title, const Line& l)
{
    std::printf("%s criterion %d: %s\n", l.ok ? "PASS" : "FAIL", n, title.c_str());
    for (const auto& d : l.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!l.ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Timed {
    Report report;
    double seconds = 0;
    std::string error;
};

Timed run(const char* text, const PipelineConfig& cfg)
{
    Timed t;
    auto t0 = std::chrono::steady_clock::now();
    try {
        t.report = analyze(parse_polynomial(text), cfg);
    } catch (const std::exception& e) {
        t.error = e.what();
    }
    t.seconds = seconds_since(t0);
    return t;
}

// Verdicts that are not flagged as K0 collisions.
std::vector<const Verdict*> classified(const Report& r)
{
    std::vector<const Verdict*> out;
    for (const auto& v : r.verdicts)
        if (v.status != Status::collides_with_K0) out.push_back(&v);
    return out;
}

const Verdict* near_zero(const Report& r, double tol)
{
    for (const auto* v : classified(r))
        if (std::abs(v->lambda()) < tol) return v;
    return nullptr;
}

std::multiset<int> sums(const Verdict& v)
{
    std::multiset<int> s;
    for (const auto& e : v.regions) s.insert(e.index_sum);
    return s;
}

std::string str(const std::multiset<int>& s)
{
    std::string out = "{";
    for (int x : s) out += (out.size() > 1 ? "," : "") + std::to_string(x);
    return out + "}";
}

std::string num(double x)
{
    std::ostringstream o;
    o << x;
    return o.str();
}

}  // namespace

int main()
{
    const PipelineConfig defaults;

    // ---- 1 -------------------------------------------------------------
    Timed quintic = run(kQuintic, defaults);
    {
        Line l;
        l.need(quintic.error.empty(), "analysis completed " + quintic.error);
        auto vs = classified(quintic.report);
        l.need(vs.size() == 1, "finite candidates: " + std::to_string(vs.size()));
        const Verdict* v = near_zero(quintic.report, 1e-3);
        l.need(v != nullptr, "candidate within 1e-3 of 0" + (v ? ": " + num(v->lambda()) : std::string()));
        l.need(quintic.report.branches.size() == 8, "tangency branches: " + std::to_string(quintic.report.branches.size()) + " (expected 8)");
        if (v) {
            l.need(v->regions.size() == 2, "regions: " + std::to_string(v->regions.size()));
            l.need(sums(*v) == std::multiset<int>{0, 0}, "region sums " + str(sums(*v)));
            l.need(v->vanishing && v->vanishing->verdict == VanishingVerdict::none,
                   "vanishing " + (v->vanishing ? to_string(v->vanishing->verdict) : std::string("missing")));
            l.need(v->status == Status::typical, "status " + to_string(v->status));
        }
        l.need(quintic.seconds <= 300, "runtime " + num(quintic.seconds) + " s (limit 300)");
        report(1, "first example end to end", l);
    }

    // ---- 2 -------------------------------------------------------------
    Timed valley = run(kValley, defaults);
    {
        Line l;
        l.need(valley.error.empty(), "analysis completed " + valley.error);
        const Verdict* v = near_zero(valley.report, 1e-3);
        l.need(v != nullptr, "candidate at 0" + (v ? ": " + num(v->lambda()) : std::string()));
        if (v) {
            l.need(v->circle_count == 5, "level circles: " + std::to_string(v->circle_count));
            l.need(v->regions.size() == 6, "regions: " + std::to_string(v->regions.size()));
            l.need(sums(*v) == std::multiset<int>{-1, 0, 0, 0, 0, 1}, "region sums " + str(sums(*v)) + " (one +1, one -1)");
            l.need(v->vanishing && v->vanishing->verdict == VanishingVerdict::vanishing,
                   "vanishing " + (v->vanishing ? to_string(v->vanishing->verdict) : std::string("missing")));
            l.need(v->status == Status::atypical, "status " + to_string(v->status));
        }
        l.need(valley.seconds <= 600, "runtime " + num(valley.seconds) + " s (limit 600)");
        report(2, "second example end to end", l);
    }

    // ---- 3 -------------------------------------------------------------
    Timed intro = run(kIntro, defaults);
    {
        Line l;
        l.need(intro.error.empty(), "analysis completed " + intro.error);
        auto atyp = intro.report.atypical_values();
        l.need(atyp.size() == 1 && std::abs(atyp[0]) < 1e-3,
               "atypical values: " + std::to_string(atyp.size()) + (atyp.empty() ? "" : " first " + num(atyp[0])));
        l.need(intro.seconds <= 300, "runtime " + num(intro.seconds) + " s (limit 300)");
        report(3, "x(xy+1) has 0 as its only atypical value", l);
    }

    // ---- 4 -------------------------------------------------------------
    {
        Line l;
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> coef(-6, 6), keep(0, 2);
        std::uniform_real_distribution<double> radius(0.5, 6);
        int accepted = 0, capped = 0, silent = 0;
        for (int trial = 0; trial < 20; ++trial) {
            Polynomial::TermMap terms;
            for (int i = 0; i <= 4; ++i)
                for (int j = 0; i + j <= 4; ++j)
                    for (int k = 0; i + j + k <= 4; ++k)
                        if (i + j + k > 0 && keep(rng) == 0) terms[{i, j, k}] = Rational(coef(rng), 1 + keep(rng));
            terms[{1, 0, 0}] += 1;  // never constant
            Polynomial p(terms);
            FieldPair f(p);
            Center c = choose_generic_center(p, rng());
            const double r = radius(rng);
            auto z = find_sphere_zeros_audited(f, c, quad(r), 6, 8, Tolerances{});
            if (!z.audit_ok) {
                // the refinement cap must be visible in the diagnostics
                bool diagnosed = z.unresolved_faces + z.unresolved_edges > 0 || z.index_sum != 2;
                if (diagnosed) ++capped;
                else ++silent;
                continue;
            }
            ++accepted;
            int idx = 0, winding = 0;
            bool winding_ok = true;
            for (const auto& q : z.zeros) {
                idx += q.index;
                auto w = winding_index(f.q, c.as_quad(), quad(r), q.position);
                if (w) winding += *w;
                else winding_ok = false;
            }
            if (idx != 2 || (winding_ok && winding != 2)) {
                ++silent;
                l.details.push_back("     trial " + std::to_string(trial) + ": index sum " + std::to_string(idx) +
                                    ", winding sum " + std::to_string(winding));
            }
        }
        l.need(silent == 0, std::to_string(accepted) + " accepted passes with sum 2, " + std::to_string(capped) +
                                " refinement-cap diagnostics, " + std::to_string(silent) + " silent wrong sums");
        report(4, "Poincare-Hopf sums on 20 random polynomials", l);
    }

    // ---- 5 and 7 (oracle runs) ------------------------------------------
    PipelineConfig with_oracle = defaults;
    with_oracle.oracle = true;
    auto t5 = std::chrono::steady_clock::now();
    struct OracleRun {
        const char* name;
        const char* text;
        Timed t;
    };
    std::vector<OracleRun> oruns{{"first example", kQuintic, {}}, {"second example", kValley, {}}, {"x(xy+1)", kIntro, {}}};
    for (auto& o : oruns) o.t = run(o.text, with_oracle);
    const double oracle_seconds = seconds_since(t5);
    {
        Line l;
        for (const auto& o : oruns) {
            l.need(o.t.error.empty(), std::string(o.name) + ": analysis completed " + o.t.error);
            for (const auto* v : classified(o.t.report))
                for (const auto& e : v->regions) {
                    std::string got = e.euler ? std::to_string(*e.euler) : "none";
                    l.need(e.euler && *e.euler == e.index_sum,
                           std::string(o.name) + " lambda " + num(v->lambda()) + " region " + std::to_string(e.region) +
                               " t " + (e.t ? num(*e.t) : "-") + ": euler " + got + ", index sum " +
                               std::to_string(e.index_sum));
                }
        }
        l.need(oracle_seconds <= 1200, "runtime " + num(oracle_seconds) + " s (limit 1200)");
        report(5, "Euler characteristic outside the ball equals the region index sum", l);
    }

    // ---- 6 -------------------------------------------------------------
    {
        Line l;
        struct Fixture {
            const char* name;
            const char* text;
            const Timed* base;
        };
        for (const Fixture& fx : {Fixture{"first example", kQuintic, &quintic}, Fixture{"second example", kValley, &valley},
                                  Fixture{"x(xy+1)", kIntro, &intro}}) {
            PipelineConfig twice = defaults, deeper = defaults, reseeded = defaults;
            twice.radius_scale = 2;
            deeper.depth = defaults.depth + 1;
            reseeded.seed = defaults.seed + 1;
            struct Variant {
                const char* what;
                PipelineConfig cfg;
            };
            for (const Variant& var : {Variant{"R -> 2R", twice}, Variant{"depth + 1", deeper}, Variant{"new seed", reseeded}}) {
                Timed t = run(fx.text, var.cfg);
                bool same = t.error.empty() && fx.base->error.empty();
                auto a = classified(fx.base->report), b = classified(t.report);
                same = same && a.size() == b.size();
                std::string desc;
                for (std::size_t i = 0; same && i < a.size(); ++i) {
                    same = same && a[i]->status == b[i]->status && sums(*a[i]) == sums(*b[i]);
                    desc += " " + to_string(b[i]->status) + str(sums(*b[i]));
                }
                l.need(same, std::string(fx.name) + ", " + var.what + ":" + desc + (t.error.empty() ? "" : " " + t.error));
            }
        }
        report(6, "statuses and index sums stable under R -> 2R, depth + 1, new seed", l);
    }

    // ---- 7 -------------------------------------------------------------
    {
        Line l;
        auto max_over = [](const Verdict* v) {
            double m = 0;
            if (v && v->sweep)
                for (const auto& [t, d] : v->sweep->max_min_distance) m = std::max(m, d);
            return m;
        };
        const Report& r28 = oruns[1].t.report;
        const Report& r27 = oruns[0].t.report;
        const Verdict* v28 = near_zero(r28, 1e-3);
        const Verdict* v27 = near_zero(r27, 1e-3);
        l.need(v28 && v28->sweep, "second example sweep present");
        l.need(v27 && v27->sweep, "first example sweep present");
        double m28 = max_over(v28), m27 = max_over(v27);
        l.need(m28 > 8 * r28.R, "second example max-min distance " + num(m28) + " > 8R = " + num(8 * r28.R));
        l.need(m27 < 2 * r27.R, "first example max-min distance " + num(m27) + " < 2R = " + num(2 * r27.R));
        if (v28 && v28->sweep) {
            std::ofstream csv("acceptance_sweep_second_example.csv");
            csv << sweep_to_csv(*v28->sweep);
        }
        report(7, "min-distance sweep separates vanishing from non-vanishing", l);
    }

    // ---- 8 -------------------------------------------------------------
    {
        Line l;
        auto t0 = std::chrono::steady_clock::now();
        Timed lin = run("x", defaults);
        l.need(lin.error.empty() && lin.report.verdicts.empty(),
               "f = x: " + std::to_string(lin.report.verdicts.size()) + " candidates");
        PipelineConfig q = defaults;
        q.lambdas = {1};
        Timed sph = run("x^2+y^2+z^2", q);
        const Verdict *one = nullptr, *zero = nullptr;
        for (const auto& v : sph.report.verdicts) {
            if (std::abs(v.lambda() - 1) < 1e-9) one = &v;
            if (std::abs(v.lambda()) < 1e-9) zero = &v;
        }
        l.need(one && one->status == Status::typical, "sphere: 1 is " + (one ? to_string(one->status) : std::string("missing")));
        l.need(zero && zero->status == Status::collides_with_K0 && zero->candidate.collides_with_K0,
               "sphere: 0 is " + (zero ? to_string(zero->status) : std::string("missing")));
        const double secs = seconds_since(t0);
        l.need(secs <= 60, "runtime " + num(secs) + " s (limit 60)");
        report(8, "trivial inputs", l);
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
