#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "atlas/oracle.hpp"
#include "atlas/index_calculus.hpp"
#include "atlas/vanishing.hpp"

using namespace atlas;

namespace {

const char* kQuintic = "2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y";
const char* kValley = "x^2*y^3*(y^2-25)^2 + 2*x*y*(y^2-25)*(y+25) - y^4 - y^3 + 50*y^2 + 51*y - 575";

// n x m quad grid, either wrapped into a cylinder or flat (a disk)
TriangleSoup strip(int n, int m, bool cylinder)
{
    TriangleSoup s;
    const int cols = cylinder ? n : n + 1;
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i < cols; ++i) {
            double th = 2 * std::numbers::pi * i / n;
            s.vertices.push_back(cylinder ? Vec3d(std::cos(th), std::sin(th), double(j)) : Vec3d(i, j, 0));
        }
    auto id = [&](int i, int j) { return j * cols + (i % cols); };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            s.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            s.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return s;
}

}  // namespace

TEST_CASE("Euler characteristic of synthetic patches")
{
    auto cyl = surface_components(strip(12, 3, true), {0, 0, 0});
    REQUIRE(cyl.size() == 1);
    CHECK(cyl[0].chi == 0);
    CHECK(cyl[0].has_boundary);
    auto disk = surface_components(strip(5, 4, false), {0, 0, 0});
    REQUIRE(disk.size() == 1);
    CHECK(disk[0].chi == 1);
}

TEST_CASE("unit sphere fiber: one compact component with chi 2")
{
    FieldPair f(parse_polynomial("x^2+y^2+z^2"));
    auto s = extract_fiber(f, 1, Box::cube({0, 0, 0}, 2), {0.1, 0.2, 0.3}, 0.5, OracleConfig{64, 256});
    REQUIRE(s.components() == 1);
    CHECK(s.per_component[0].chi == 2);
    CHECK_FALSE(s.per_component[0].touches_box_boundary);
    CHECK(s.per_component[0].min_distance_to_a == doctest::Approx(1 - std::sqrt(0.14)).epsilon(0.02));

    CHECK(compact_component_test(f, 4, {0, 0, 0}, 1, Box::cube({0, 0, 0}, 4), OracleConfig{64, 256}));
}

TEST_CASE("plane fiber is a boundary-touching disk")
{
    FieldPair f(parse_polynomial("x"));
    auto s = extract_fiber(f, 0, Box::cube({0.1, 0, 0}, 3), {0.1, 0, 0}, 1);
    REQUIRE(s.components() == 1);
    CHECK(s.per_component[0].chi == 1);
    CHECK(s.per_component[0].touches_box_boundary);
    CHECK_FALSE(compact_component_test(f, 0.5, {0, 0, 0}, 1, Box::cube({0, 0, 0}, 3)));
    // a tilted plane goes through the grid path
    FieldPair g(parse_polynomial("x + z"));
    auto sg = extract_fiber(g, 0, Box::cube({0.1, 0.05, 0.02}, 3), {0.1, 0, 0}, 1, OracleConfig{32, 256});
    REQUIRE(sg.components() == 1);
    CHECK_FALSE(sg.planar);
    CHECK(sg.per_component[0].chi == 1);
    CHECK(sg.per_component[0].touches_box_boundary);
}

TEST_CASE("second example slice at t = 1/100 has five components")
{
    FieldPair f(parse_polynomial(kValley));
    auto curves = planar_level_curves(f, 0.01, PlanarBox{-40, 40, -40, 40}, 0);
    CHECK(curves.size() == 5);
    for (const auto& c : curves) CHECK(c.ok);
    auto s = extract_fiber(f, 0.01, Box::cube({0, 0, 0}, 40), {0, 0, 0}, 1);
    CHECK(s.components() == 5);
}

TEST_CASE("serial and parallel marching tetrahedra agree exactly")
{
    PolyField<double> f(parse_polynomial("x^2*y - z^3 + x*z - 1/2"));
    auto box = Box::cube({0.1, -0.2, 0.05}, 2);
    auto a = marching_tetrahedra(f, 0.3, box, 40);
    auto b = marching_tetrahedra_serial(f, 0.3, box, 40);
    CHECK(a.triangles == b.triangles);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
        CHECK(a.vertices[i].z == b.vertices[i].z);
    }
}

TEST_CASE("property: closed marching surfaces have even Euler characteristic")
{
    PolyField<double> f(parse_polynomial("x^4 + y^4 + z^4 - x^2 - y^2"));
    for (double t : {-0.2, 0.1, 1.0}) {
        auto soup = marching_tetrahedra(f, t, Box::cube({0.01, 0.02, 0.03}, 2), 48);
        for (const auto& c : surface_components(soup, {0, 0, 0})) {
            CHECK_FALSE(c.has_boundary);
            CHECK(c.chi % 2 == 0);
            CHECK(c.chi <= 2);
        }
    }
}

TEST_CASE("exact univariate roots")
{
    // (s-1)(s-2)(s-3)
    auto r = real_roots({quad(-6), quad(11), quad(-6), quad(1)}, quad(0), quad(4));
    REQUIRE(r.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(to_double(r[i]) - (i + 1)) < 1e-25);
    // (s - 1)(s - 1 - 1e-6)
    quad e("1e-6");
    auto close = real_roots({1 + e, -(2 + e), quad(1)}, quad(0), quad(2));
    REQUIRE(close.size() == 2);
    CHECK(to_double(close[1] - close[0]) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(real_roots({quad(1), quad(0), quad(1)}, quad(-10), quad(10)).empty());
}

TEST_CASE("K0 estimates")
{
    Tolerances tol;
    FieldPair sphere(parse_polynomial("x^2+y^2+z^2"));
    auto k = compute_K0(sphere, Box::cube({0.1, 0.1, 0.1}, 8), tol);
    REQUIRE(k.size() == 1);
    CHECK(std::abs(k[0]) < 1e-12);

    CHECK(compute_K0(FieldPair(parse_polynomial("x")), Box::cube({0, 0, 0}, 8), tol).empty());
    // the first example has no real critical point
    CHECK(compute_K0(FieldPair(parse_polynomial(kQuintic)), Box::cube({0, 0, 0}, 40), tol).empty());

    // critical values of the second example, frozen from an elimination
    // (resultant in x) done outside this code base
    auto k28 = compute_K0(FieldPair(parse_polynomial(kValley)), Box::cube({-0.7, -0.7, 0}, 94), tol);
    const double expected[] = {-575, -222.147737957408, -80, 180};
    REQUIRE(k28.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(k28[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("Euler characteristic outside the ball equals the region sums")
{
    struct Case {
        const char* text;
        double R;
    };
    for (const Case& cs : {Case{kValley, 5.875}, Case{"x*(x*y+1)", 2.8125}}) {
        FieldPair f(parse_polynomial(cs.text));
        Center c = choose_generic_center(f.poly, 1);
        Tolerances tol;
        auto zeros = find_sphere_zeros_audited(f, c, quad(cs.R), 6, 8, tol);
        auto br = trace_branches(f, c, zeros.zeros, cs.R, tol);
        auto cands = collect_candidates(br, {}, tol);
        REQUIRE(cands.size() == 1);
        const double lambda = cands[0].lambda;
        SphereLevelSet ls(f, c.as_quad(), quad(cs.R), quad(lambda), extrema_of(zeros.zeros));
        const auto regions = ls.regions();
        bool saw_nonzero = false;
        for (const auto& reg : regions) {
            std::vector<CriticalPoint> members;
            for (int m : cands[0].members)
                if (ls.region_of(br[m].base.position) == reg.id) members.push_back(br[m].base);
            const int sum = region_index_sum(members);
            saw_nonzero = saw_nonzero || sum != 0;
            const double t = lambda + reg.sign * 1e-2;
            auto cr = distance_critical_values_on_level(f, c, t, br, cs.R, tol);
            double rmax = cs.R;
            for (double r : cr.radii) rmax = std::max(rmax, r);
            auto chi = euler_outside_ball(f, t, ls, reg.id, std::max(4 * cs.R, 2 * rmax), br);
            REQUIRE(chi);
            CHECK(*chi == sum);
        }
        CHECK(saw_nonzero);
    }
}

TEST_CASE("sweep: bounded distances for a plane, CSV layout")
{
    FieldPair f(parse_polynomial("x"));
    auto schedule = sweep_schedule(0, {-1, 1}, 1, 3);
    CHECK(schedule.size() == 6);
    Vec3d a{0.2, 0.1, 0};
    auto sw = min_fiber_distance_sweep(f, schedule, a, 1, Box::cube(a, 16));
    REQUIRE(sw.max_min_distance.size() == 6);
    for (const auto& [t, m] : sw.max_min_distance) CHECK(m == doctest::Approx(std::abs(t - 0.2)).epsilon(1e-6));
    auto csv = sweep_to_csv(sw);
    CHECK(csv.rfind("t,component_id,min_distance,chi,compact\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(sw.rows.size()) + 1);
}
