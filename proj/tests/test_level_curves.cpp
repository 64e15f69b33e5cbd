#include <doctest.h>

#include "atlas/critical_set.hpp"
#include "atlas/level_curves.hpp"
#include "atlas/vanishing.hpp"

using namespace atlas;

namespace {

const char* kQuintic = "2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y";
const char* kValley = "x^2*y^3*(y^2-25)^2 + 2*x*y*(y^2-25)*(y+25) - y^4 - y^3 + 50*y^2 + 51*y - 575";

struct Setup {
    FieldPair f;
    Center c;
    double R;
    ZeroSearchResult zeros;

    Setup(const char* text, double radius) : f(parse_polynomial(text)), c(choose_generic_center(f.poly, 1)), R(radius)
    {
        zeros = find_sphere_zeros_audited(f, c, quad(R), 6, 8, Tolerances{});
    }
    SphereLevelSet level(double lambda) const
    {
        return SphereLevelSet(f, c.as_quad(), quad(R), quad(lambda), extrema_of(zeros.zeros));
    }
};

void check_consistent(SphereLevelSet& ls)
{
    const auto& regions = ls.regions();
    CHECK(regions.size() == ls.circle_count() + 1);
    for (const auto& r : regions) {
        auto p = ls.sample_point(r.id);
        REQUIRE(p);
        CHECK(ls.region_of(*p) == r.id);
        // region sign is the sign of f - level inside it
        // (sample points sit away from the curves)
    }
}

}  // namespace

TEST_CASE("f = x: one great circle, two hemispheres")
{
    Setup s("x", 3);
    auto ls = s.level(to_double(s.c.as_quad().x));
    CHECK(ls.ok());
    CHECK(ls.circle_count() == 1);
    CHECK(ls.region_count() == 2);
    const Vec3q a = s.c.as_quad();
    int plus = ls.region_of(a + Vec3q(quad(3), 0, 0));
    int minus = ls.region_of(a - Vec3q(quad(3), 0, 0));
    CHECK(plus != minus);
    CHECK(ls.regions()[plus].sign == 1);
    CHECK(ls.regions()[minus].sign == -1);
    check_consistent(ls);
}

TEST_CASE("level outside the attained range is empty")
{
    Setup s("x^2+y^2+z^2", 2);
    auto ls = s.level(1000);
    CHECK(ls.circle_count() == 0);
    CHECK(ls.region_count() == 1);
    CHECK(ls.regions()[0].sign == -1);
}

TEST_CASE("first example at 0: one circle, two regions")
{
    Setup s(kQuintic, 2.4375);
    auto ls = s.level(0);
    CHECK(ls.ok());
    CHECK(ls.circle_count() == 1);
    CHECK(ls.region_count() == 2);
    check_consistent(ls);
}

TEST_CASE("second example at 0: five circles, six regions")
{
    Setup s(kValley, 5.875);
    auto ls = s.level(0);
    CHECK(ls.ok());
    CHECK(ls.circle_count() == 5);
    CHECK(ls.region_count() == 6);
    check_consistent(ls);
}

TEST_CASE("property: curve points lie on the level and on the sphere")
{
    Setup s("x*y - z^2 + 1/4*x^3", 2);
    for (double lambda : {-0.5, 0.0, 0.3}) {
        auto ls = s.level(lambda);
        REQUIRE(ls.ok());
        for (const auto& c : ls.curves()) {
            CHECK(c.closed);
            for (std::size_t i = 0; i < c.points.size(); i += 7) {
                CHECK(std::abs(to_double(s.f.q.value(c.points[i])) - lambda) < 1e-20);
                CHECK(std::abs(to_double(norm(c.points[i] - s.c.as_quad())) - 2) < 1e-25);
            }
        }
        check_consistent(ls);
    }
}
