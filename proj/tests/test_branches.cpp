#include <cmath>

#include <doctest.h>

#include "atlas/branches.hpp"
#include "atlas/vanishing.hpp"

using namespace atlas;

namespace {

const char* kQuintic = "2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y";

struct Traced {
    FieldPair f;
    Center c;
    double R;
    ZeroSearchResult zeros;
    std::vector<TangencyBranch> branches;

    Traced(const char* text, double radius) : f(parse_polynomial(text)), c(choose_generic_center(f.poly, 1)), R(radius)
    {
        zeros = find_sphere_zeros_audited(f, c, quad(R), 6, 8, Tolerances{});
        branches = trace_branches(f, c, zeros.zeros, R, Tolerances{});
    }
};

std::vector<double> geometric(double r0, double q, int n)
{
    std::vector<double> r;
    for (int i = 0; i < n; ++i) r.push_back(r0 * std::pow(q, i));
    return r;
}

}  // namespace

TEST_CASE("synthetic limits")
{
    auto r = geometric(2, 1.25, 30);
    std::vector<double> v;
    for (double x : r) v.push_back(3 + 1 / x);
    auto e = estimate_limit(r, v, 1e8);
    CHECK(e.kind == LimitKind::finite);
    CHECK(e.value == doctest::Approx(3).epsilon(1e-6));
    CHECK(e.alpha == doctest::Approx(1).epsilon(0.05));

    std::vector<double> w;
    for (double x : geometric(2, 2, 30)) w.push_back(x * x);
    auto rw = geometric(2, 2, 30);
    CHECK(estimate_limit(rw, w, 1e8).kind == LimitKind::plus_infinity);
    for (double& x : w) x = -x;
    CHECK(estimate_limit(rw, w, 1e8).kind == LimitKind::minus_infinity);

    // too few samples
    CHECK(estimate_limit({1, 2, 3}, {1, 1, 1}, 1e8).kind == LimitKind::undetermined);
}

TEST_CASE("f = x: both branches run to infinity along the axis")
{
    Traced t("x", 2);
    REQUIRE(t.branches.size() == 2);
    Vec3d a = t.c.as_double();
    for (const auto& b : t.branches) {
        CHECK(b.limit_kind == (b.base.kind == Kind::max ? LimitKind::plus_infinity : LimitKind::minus_infinity));
        CHECK(b.direction == (b.base.kind == Kind::max ? Direction::increasing : Direction::decreasing));
        for (const auto& s : b.samples) {
            Vec3d x = to_double(s.x);
            CHECK(std::abs(x.y - a.y) < 1e-12 * s.r);
            CHECK(std::abs(x.z - a.z) < 1e-12 * s.r);
            CHECK(to_double(s.value) == doctest::Approx(x.x).epsilon(1e-12));
        }
    }
    CHECK(collect_candidates(t.branches, {}, Tolerances{}).empty());
    auto lists = build_candidate_lists(t.branches, {});
    CHECK(lists.P_min.empty());
    CHECK(lists.P_max.empty());
    CHECK(lists.Lambda_min.empty());
    CHECK(lists.Lambda_max.empty());
}

TEST_CASE("first example: one finite candidate at 0")
{
    Traced t(kQuintic, 2.4375);
    auto cands = collect_candidates(t.branches, {}, Tolerances{});
    REQUIRE(cands.size() == 1);
    CHECK(std::abs(cands[0].lambda) < 1e-3);
    CHECK_FALSE(cands[0].collides_with_K0);
    // a local minimum whose values decrease to 0
    bool min_down = false;
    for (int id : cands[0].members) {
        const auto& b = t.branches[id];
        if (b.base.kind == Kind::min && b.direction == Direction::decreasing) min_down = true;
        CHECK(std::abs(b.limit) < 1e-4);
    }
    CHECK(min_down);
    auto lists = build_candidate_lists(t.branches, cands);
    CHECK_FALSE(lists.P_min[0].empty());

    auto flagged = collect_candidates(t.branches, {0.0}, Tolerances{});
    CHECK(flagged[0].collides_with_K0);
}

TEST_CASE("x(xy+1): one branch stays bounded and tends to 0")
{
    Traced t("x*(x*y+1)", 2.8125);
    int finite = 0;
    for (const auto& b : t.branches)
        if (b.finite_limit()) {
            ++finite;
            CHECK(std::abs(b.limit) < 1e-4);
        }
    CHECK(finite >= 1);
    auto cands = collect_candidates(t.branches, {}, Tolerances{});
    REQUIRE(cands.size() == 1);
    CHECK(std::abs(cands[0].lambda) < 1e-4);
}

TEST_CASE("property: branch samples stay on the polar curve and their spheres")
{
    Traced t(kQuintic, 2.4375);
    const Vec3q a = t.c.as_quad();
    for (const auto& b : t.branches) {
        REQUIRE(b.samples.size() >= 2);
        CHECK_FALSE(b.lost);
        for (std::size_t k = 0; k < b.samples.size(); ++k) {
            const auto& s = b.samples[k];
            if (k) CHECK(s.r > b.samples[k - 1].r);
            CHECK(s.sphere_residual < 1e-20);
            auto fs = t.f.q.sample(s.x, false);
            Vec3q d = s.x - a;
            // (x - a) x grad f vanishes relative to |x - a| |grad f|
            CHECK(to_double(norm(cross(d, fs.grad)) / (norm(d) * norm(fs.grad))) < 1e-18);
        }
        if (b.monotone && b.direction == Direction::increasing)
            for (std::size_t k = 1; k < b.samples.size(); ++k) CHECK(b.samples[k].value >= b.samples[k - 1].value);
    }
    CHECK_FALSE(branches_merge(t.branches, Tolerances{}));
}
