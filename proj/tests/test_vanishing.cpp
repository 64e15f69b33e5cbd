#include <doctest.h>

#include "atlas/vanishing.hpp"

using namespace atlas;

namespace {

const char* kQuintic = "2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y";
const char* kValley = "x^2*y^3*(y^2-25)^2 + 2*x*y*(y^2-25)*(y+25) - y^4 - y^3 + 50*y^2 + 51*y - 575";

struct Setup {
    FieldPair f;
    Center c;
    double R;
    Tolerances tol;
    ZeroSearchResult zeros;
    std::vector<TangencyBranch> branches;
    std::vector<Candidate> cands;
    CandidateLists lists;

    Setup(const char* text, double radius, Center center) : f(parse_polynomial(text)), c(center), R(radius)
    {
        zeros = find_sphere_zeros_audited(f, c, quad(R), 6, 8, tol);
        branches = trace_branches(f, c, zeros.zeros, R, tol);
        cands = collect_candidates(branches, {}, tol);
        lists = build_candidate_lists(branches, cands);
    }
    Setup(const char* text, double radius) : Setup(text, radius, choose_generic_center(parse_polynomial(text), 1)) {}

    VanishingReport detect(int i)
    {
        return detect_vanishing(f, c, cands[i].lambda, lists.P_min[i], lists.P_max[i], branches, R, zeros.zeros, tol);
    }
};

}  // namespace

TEST_CASE("critical radii of the distance on a level set")
{
    Setup s("x", 1, Center{{0, 0, 0}, 0});
    auto cr = distance_critical_values_on_level(s.f, s.c, 5, s.branches, s.R, s.tol);
    REQUIRE(cr.radii.size() == 1);
    CHECK(cr.radii[0] == doctest::Approx(5).epsilon(1e-9));
    CHECK(cr.complete);

    // every branch value of the off-center radial function stays above 0.01
    Setup q("x^2+y^2+z^2", 1, Center{{Rational(1, 3), 0, 0}, 0});
    CHECK(distance_critical_values_on_level(q.f, q.c, 0.01, q.branches, q.R, q.tol).radii.empty());
}

TEST_CASE("flow along a level set to a target distance")
{
    PolyField<quad> f(parse_polynomial("x + 1/4*y^2"));
    Vec3q a{0, 0, 0};
    Vec3q start{quad(-0.25), quad(1), 0};
    auto out = flow_on_level(f, a, quad(0), start, quad(3));
    REQUIRE(out.end == FlowEnd::landed);
    CHECK(std::abs(to_double(f.value(out.x))) < 1e-20);
    CHECK(to_double(norm(out.x - a)) == doctest::Approx(3).epsilon(1e-15));
}

TEST_CASE("touching sphere fiber meets the sphere in one point")
{
    // near point: the fiber through it is the sphere of radius R - 1/3 inside B_R
    Setup s("x^2+y^2+z^2", 1, Center{{Rational(1, 3), 0, 0}, 0});
    for (const auto& b : s.branches) {
        if (b.base.kind != Kind::min) continue;
        auto r = isolated_intersection_test(s.f, s.c, b, s.branches, s.R, s.zeros.zeros, s.tol);
        INFO(r.detail);
        CHECK(r.outcome == Outcome::positive);
    }
}

TEST_CASE("first example: no vanishing component at 0")
{
    Setup s(kQuintic, 2.4375);
    REQUIRE(s.cands.size() == 1);
    CHECK_FALSE(s.lists.P_min[0].empty());
    for (int id : s.lists.P_min[0]) {
        auto r = isolated_intersection_test(s.f, s.c, s.branches[id], s.branches, s.R, s.zeros.zeros, s.tol);
        CHECK(r.outcome == Outcome::negative);
    }
    auto rep = s.detect(0);
    CHECK(rep.verdict == VanishingVerdict::none);
}

TEST_CASE("second example: vanishing at 0 with a positive witness")
{
    Setup s(kValley, 5.875);
    int zero = -1;
    for (std::size_t i = 0; i < s.cands.size(); ++i)
        if (std::abs(s.cands[i].lambda) < 1e-6) zero = static_cast<int>(i);
    REQUIRE(zero >= 0);
    CHECK(s.lists.P_min[zero].size() + s.lists.P_max[zero].size() > 0);
    auto rep = s.detect(zero);
    CHECK(rep.verdict == VanishingVerdict::vanishing);
    bool positive = false;
    for (const auto& w : rep.witnesses) positive = positive || w.result.outcome == Outcome::positive;
    CHECK(positive);
    CHECK_FALSE(to_json(rep).dump().empty());
}

TEST_CASE("f = x: empty lists, no vanishing")
{
    Setup s("x", 2);
    CHECK(s.cands.empty());
    auto rep = detect_vanishing(s.f, s.c, 0, {}, {}, s.branches, s.R, s.zeros.zeros, s.tol);
    CHECK(rep.verdict == VanishingVerdict::none);
    CHECK(rep.witnesses.empty());
}
