#include <random>

#include <doctest.h>

#include "atlas/poly.hpp"

using namespace atlas;

namespace {

Polynomial P(const char* s) { return parse_polynomial(s); }

Polynomial random_poly(std::mt19937_64& rng, int max_degree)
{
    std::uniform_int_distribution<int> coef(-9, 9), deg(0, max_degree);
    Polynomial::TermMap terms;
    for (int k = 0; k < 8; ++k) {
        int d = deg(rng);
        std::uniform_int_distribution<int> part(0, d);
        int i = part(rng);
        int j = std::uniform_int_distribution<int>(0, d - i)(rng);
        terms[{i, j, d - i - j}] += Rational(coef(rng), 1 + (k % 3));
    }
    return Polynomial(terms);
}

}  // namespace

TEST_CASE("parse: single variable and merged terms")
{
    auto p = P("x");
    CHECK(p.terms().size() == 1);
    CHECK(p.coefficient({1, 0, 0}) == 1);

    auto q = P("x*(x*y+1)");
    CHECK(q.terms().size() == 2);
    CHECK(q.coefficient({2, 1, 0}) == 1);
    CHECK(q.coefficient({1, 0, 0}) == 1);

    auto g = P("2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y");
    CHECK(g.coefficient({0, 5, 0}) == 2);
    CHECK(g.coefficient({1, 4, 0}) == 4);
    CHECK(g.coefficient({2, 3, 0}) == 2);
    CHECK(g.coefficient({0, 3, 0}) == -9);
    CHECK(g.coefficient({1, 2, 0}) == -9);
    CHECK(g.coefficient({0, 1, 0}) == 12);
    CHECK_FALSE(g.depends_on(2));
    CHECK(g.degree() == 5);

    CHECK(P("x - x").is_zero());
    CHECK(P("3/4*z^2").coefficient({0, 0, 2}) == Rational(3, 4));
}

TEST_CASE("parse: errors carry a position")
{
    CHECK_THROWS_AS(P("x + * y"), ParseError);
    CHECK_THROWS_AS(P("w + 1"), ParseError);
    CHECK_THROWS_AS(P("1.5e-3*x"), ParseError);
    try {
        P("x + q");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("evaluate: exact and floating")
{
    CHECK(evaluate(P("x*(x*y+1)"), std::array<Rational, 3>{0, 5, 3}) == 0);
    auto g = P("2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y");
    CHECK(evaluate(g, std::array<Rational, 3>{0, 1, 0}) == 5);
    CHECK(evaluate(Polynomial(), std::array<double, 3>{1.5, -2, 7}) == 0);
    CHECK(evaluate(g, std::array<double, 3>{0, 1, 0}, EvalMode::exact) == 5);
    CHECK_THROWS_AS(evaluate(g, std::array<double, 3>{std::nan(""), 1, 0}, EvalMode::exact), EvaluationError);
}

TEST_CASE("gradient and hessian by hand")
{
    auto gs = gradient(P("x^2+y^2+z^2"));
    CHECK(gs[0] == P("2*x"));
    CHECK(gs[1] == P("2*y"));
    CHECK(gs[2] == P("2*z"));

    auto gx = gradient(P("x*(x*y+1)"));
    CHECK(gx[0] == P("2*x*y+1"));
    CHECK(gx[1] == P("x^2"));
    CHECK(gx[2].is_zero());

    for (const auto& c : gradient(P("7/3"))) CHECK(c.is_zero());

    auto hs = hessian(P("x^2+y^2+z^2"));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(hs[i][j] == Polynomial::constant(i == j ? 2 : 0));

    auto hxy = hessian(P("x*y"));
    CHECK(hxy[0][1] == Polynomial::constant(1));
    CHECK(hxy[1][0] == Polynomial::constant(1));
    CHECK(hxy[0][0].is_zero());
    CHECK(hxy[2][2].is_zero());

    auto h = hessian(P("x*(x*y+1)"));
    CHECK(h[0][0] == P("2*y"));
    CHECK(h[0][1] == P("2*x"));
    CHECK(h[1][1].is_zero());
    CHECK(h[2][0].is_zero());
}

TEST_CASE("polar minors")
{
    Center origin{{0, 0, 0}, 0};
    auto m = polar_minors(P("x"), origin);
    CHECK(m[0].is_zero());
    CHECK(m[1] == P("z"));
    CHECK(m[2] == P("-y"));

    for (const auto& c : polar_minors(P("x^2+y^2+z^2"), origin)) CHECK(c.is_zero());

    // planar input, center in z = 0
    auto g = P("x^2*y - 3*y^2 + x");
    Center a{{Rational(1, 3), Rational(-2, 5), 0}, 0};
    auto mg = polar_minors(g, a);
    auto gg = gradient(g);
    auto X = P("x") - Polynomial::constant(Rational(1, 3));
    auto Y = P("y") + Polynomial::constant(Rational(2, 5));
    CHECK(mg[0] == -(P("z") * gg[1]));
    CHECK(mg[1] == P("z") * gg[0]);
    CHECK(mg[2] == X * gg[1] - Y * gg[0]);
}

TEST_CASE("property: float evaluation tracks exact evaluation")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-1e3, 1e3);
    for (int trial = 0; trial < 60; ++trial) {
        auto p = random_poly(rng, 10);
        std::array<double, 3> x{coord(rng), coord(rng), coord(rng)};
        std::array<Rational, 3> xr{Rational(x[0]), Rational(x[1]), Rational(x[2])};
        double exact = evaluate(p, xr).convert_to<double>();
        double fl = evaluate(p, x);
        // relative to the term magnitude, which bounds cancellation
        double mag = 0;
        for (const auto& [e, c] : p.terms())
            mag += std::abs(c.convert_to<double>() * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]));
        CHECK(std::abs(fl - exact) <= 1e-9 * std::max(mag, 1e-300));
    }
}

TEST_CASE("property: exact Hessian symmetry, cross-product syzygy, singular points on the polar set")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> small(-20, 20);
    for (int trial = 0; trial < 30; ++trial) {
        auto p = random_poly(rng, 5);
        auto h = hessian(p);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(h[i][j] == h[j][i]);

        Center a{{Rational(small(rng), 7), Rational(small(rng), 5), Rational(small(rng), 3)}, 0};
        auto m = polar_minors(p, a);
        std::array<Rational, 3> x{Rational(small(rng), 3), Rational(small(rng), 2), Rational(small(rng), 11)};
        Rational syz = 0;
        for (int i = 0; i < 3; ++i) syz += (x[i] - a.a[i]) * evaluate(m[i], x);
        CHECK(syz == 0);
    }
    // x^2 - y^2 + z^2 is singular at the origin only
    auto p = P("x^2 - y^2 + z^2");
    Center a{{1, 2, 3}, 0};
    for (const auto& mi : polar_minors(p, a)) CHECK(evaluate(mi, std::array<Rational, 3>{0, 0, 0}) == 0);
}

TEST_CASE("JSON round trip and text forms")
{
    auto g = P("2*y^5 + 4*x*y^4 + (2*x^2-9)*y^3 - 9*x*y^2 + 12*y");
    CHECK(polynomial_from_json(to_json(g)) == g);
    CHECK(read_polynomial_text(to_json(g).dump()) == g);
    CHECK(parse_polynomial(to_string(g)) == g);
}
