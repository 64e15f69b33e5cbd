#include <set>

#include <doctest.h>

#include "atlas/pipeline.hpp"

using namespace atlas;

namespace {

// Status invariants every verdict must satisfy.
void check_verdict_invariants(const Verdict& v)
{
    if (v.status == Status::collides_with_K0) {
        CHECK(v.regions.empty());
        return;
    }
    bool nonzero = false;
    for (const auto& r : v.regions) nonzero = nonzero || r.index_sum != 0;
    REQUIRE(v.vanishing);
    const auto van = v.vanishing->verdict;
    if (v.status == Status::atypical) CHECK((nonzero || van == VanishingVerdict::vanishing));
    if (v.status == Status::typical) {
        CHECK_FALSE(nonzero);
        CHECK(van == VanishingVerdict::none);
    }
    if (v.status == Status::undetermined) CHECK_FALSE(v.undetermined_parts.empty());
    CHECK_FALSE(v.rationale.empty());
}

void check_report_invariants(const Report& r)
{
    for (const auto& v : r.verdicts) check_verdict_invariants(v);
    // every finite branch limit is carried by exactly one verdict
    std::multiset<int> members;
    for (const auto& v : r.verdicts) members.insert(v.candidate.members.begin(), v.candidate.members.end());
    for (const auto& b : r.branches)
        if (b.finite_limit()) CHECK(members.count(b.id) == 1);
    auto j = to_json(r);
    CHECK(j["schema"] == "atlas-at-infinity/1");
    CHECK(j["verdicts"].size() == r.verdicts.size());
}

}  // namespace

TEST_CASE("f = x: no candidates")
{
    auto r = analyze(parse_polynomial("x"), PipelineConfig{});
    CHECK(r.verdicts.empty());
    CHECK(r.K0.empty());
    CHECK(std::find(r.notes.begin(), r.notes.end(), "no atypical values at infinity detected") != r.notes.end());
    check_report_invariants(r);
}

TEST_CASE("radial function: 1 typical, 0 reported without classification")
{
    PipelineConfig cfg;
    cfg.lambdas = {1};
    cfg.oracle = true;
    auto r = analyze(parse_polynomial("x^2+y^2+z^2"), cfg);
    REQUIRE(r.verdicts.size() == 2);
    CHECK(std::abs(r.verdicts[0].lambda()) < 1e-9);
    CHECK(r.verdicts[0].status == Status::collides_with_K0);
    CHECK(r.verdicts[1].lambda() == 1);
    CHECK(r.verdicts[1].status == Status::typical);
    REQUIRE(r.verdicts[1].conditions);
    CHECK(r.verdicts[1].conditions->no_vanishing == Tri::yes);
    CHECK(r.verdicts[1].conditions->no_compact_component == Tri::yes);
    CHECK(r.verdicts[1].conditions->euler_constant == Tri::yes);
    check_report_invariants(r);
}

TEST_CASE("x(xy+1): 0 is the only atypical value")
{
    PipelineConfig cfg;
    cfg.oracle = true;
    auto r = analyze(parse_polynomial("x*(x*y+1)"), cfg);
    auto atyp = r.atypical_values();
    REQUIRE(atyp.size() == 1);
    CHECK(std::abs(atyp[0]) < 1e-4);
    for (const auto& v : r.verdicts) {
        if (v.status != Status::atypical) continue;
        CHECK(v.euler_agrees);
        for (const auto& e : v.regions) {
            REQUIRE(e.euler);
            CHECK(*e.euler == e.index_sum);
        }
    }
    check_report_invariants(r);
}

TEST_CASE("constant input is rejected")
{
    CHECK_THROWS_AS(analyze(parse_polynomial("3"), PipelineConfig{}), std::invalid_argument);
}

TEST_CASE("property: statuses survive a center change and a doubled radius")
{
    const auto p = parse_polynomial("x*(x*y+1)");
    PipelineConfig base;
    auto r0 = analyze(p, base);
    PipelineConfig seed = base;
    seed.seed = 12345;
    PipelineConfig twice = base;
    twice.radius_scale = 2;
    for (const auto& cfg : {seed, twice}) {
        auto r = analyze(p, cfg);
        check_report_invariants(r);
        REQUIRE(r.verdicts.size() == r0.verdicts.size());
        for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
            CHECK(r.verdicts[i].status == r0.verdicts[i].status);
            std::multiset<int> a, b;
            for (const auto& e : r.verdicts[i].regions) a.insert(e.index_sum);
            for (const auto& e : r0.verdicts[i].regions) b.insert(e.index_sum);
            CHECK(a == b);
        }
    }
}
