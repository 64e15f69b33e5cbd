#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <json.hpp>

#include "atlas/numeric.hpp"

namespace atlas {

using Rational = boost::multiprecision::mpq_rational;
using Exponent = std::array<int, 3>;

// Graded-lex: higher total degree first, then lexicographically larger
// exponent first (x > y > z).
struct GradedLex {
    bool operator()(const Exponent& a, const Exponent& b) const
    {
        int da = a[0] + a[1] + a[2];
        int db = b[0] + b[1] + b[2];
        if (da != db) return da > db;
        return a > b;
    }
};

class Polynomial {
public:
    using TermMap = std::map<Exponent, Rational, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(TermMap terms);

    static Polynomial constant(const Rational& c);
    static Polynomial variable(int index);

    const TermMap& terms() const { return terms_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return degree_ == 0; }
    bool depends_on(int var) const;
    Rational coefficient(const Exponent& e) const;
    Rational max_abs_coefficient() const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    Polynomial pow(unsigned n) const;
    Polynomial derivative(int var) const;
    // p(x + shift)
    Polynomial translate(const std::array<Rational, 3>& shift) const;

private:
    void normalize();

    TermMap terms_;
    int degree_ = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Polynomial parse_polynomial(std::string_view text);
Rational parse_rational(std::string_view text);

enum class EvalMode { exact, floating };

Rational evaluate(const Polynomial& p, const std::array<Rational, 3>& x);
// Exact mode converts each coordinate to the rational it represents and
// rejects non-finite input; float mode evaluates in double.
double evaluate(const Polynomial& p, const std::array<double, 3>& x, EvalMode mode = EvalMode::floating);

std::array<Polynomial, 3> gradient(const Polynomial& p);
std::array<std::array<Polynomial, 3>, 3> hessian(const Polynomial& p);

struct Center {
    std::array<Rational, 3> a;
    std::uint64_t seed = 0;

    Vec3d as_double() const;
    Vec3q as_quad() const;
};

// Components of (x - a) x grad p.
std::array<Polynomial, 3> polar_minors(const Polynomial& p, const Center& a);

std::string to_string(const Polynomial& p);
std::string to_string(const Rational& q);
nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);
// Accepts either the JSON term format or an expression.
Polynomial read_polynomial_text(std::string_view text);

template <class T>
T rational_to(const Rational& q)
{
    if constexpr (std::is_same_v<T, double>) {
        return q.convert_to<double>();
    } else {
        T num(boost::multiprecision::numerator(q).str());
        T den(boost::multiprecision::denominator(q).str());
        return num / den;
    }
}

// Fixed term list with coefficients converted to T, evaluated through a
// shared table of coordinate powers.
template <class T>
class CompiledPolynomial {
public:
    struct Term {
        int i, j, k;
        T c;
    };

    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p)
    {
        for (const auto& [e, c] : p.terms()) terms_.push_back({e[0], e[1], e[2], rational_to<T>(c)});
    }

    template <class Powers>
    T eval(const Powers& px, const Powers& py, const Powers& pz) const
    {
        T s = 0;
        for (const auto& t : terms_) s += t.c * px[t.i] * py[t.j] * pz[t.k];
        return s;
    }

    // Sum of |terms|, used as a rounding-error scale.
    template <class Powers>
    T magnitude(const Powers& px, const Powers& py, const Powers& pz) const
    {
        using std::abs;
        T s = 0;
        for (const auto& t : terms_) s += abs(t.c * px[t.i] * py[t.j] * pz[t.k]);
        return s;
    }

    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

template <class T>
struct FieldSample {
    T f{0};
    Vec3<T> grad;
    Mat3<T> hess{};
};

// f with its exact gradient and Hessian, compiled for scalar type T.
template <class T>
class PolyField {
public:
    PolyField() = default;
    explicit PolyField(const Polynomial& p) : degree_(p.degree()), f_(p)
    {
        auto g = gradient(p);
        auto h = hessian(p);
        for (int i = 0; i < 3; ++i) g_[i] = CompiledPolynomial<T>(g[i]);
        int n = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) h_[n++] = CompiledPolynomial<T>(h[i][j]);
    }

    T value(const Vec3<T>& x) const
    {
        Powers px, py, pz;
        powers(x, px, py, pz);
        return f_.eval(px, py, pz);
    }

    // Value together with the sum of absolute term values.
    std::pair<T, T> value_and_scale(const Vec3<T>& x) const
    {
        Powers px, py, pz;
        powers(x, px, py, pz);
        return {f_.eval(px, py, pz), f_.magnitude(px, py, pz)};
    }

    FieldSample<T> sample(const Vec3<T>& x, bool with_hessian = true) const
    {
        Powers px, py, pz;
        powers(x, px, py, pz);
        FieldSample<T> s;
        s.f = f_.eval(px, py, pz);
        s.grad = {g_[0].eval(px, py, pz), g_[1].eval(px, py, pz), g_[2].eval(px, py, pz)};
        if (with_hessian) {
            int n = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    s.hess[i][j] = h_[n++].eval(px, py, pz);
                    s.hess[j][i] = s.hess[i][j];
                }
        }
        return s;
    }

    int degree() const { return degree_; }

private:
    static constexpr int kMaxDegree = 64;
    using Powers = std::array<T, kMaxDegree + 1>;

    void powers(const Vec3<T>& x, Powers& px, Powers& py, Powers& pz) const
    {
        px[0] = py[0] = pz[0] = T(1);
        for (int d = 1; d <= degree_; ++d) {
            px[d] = px[d - 1] * x.x;
            py[d] = py[d - 1] * x.y;
            pz[d] = pz[d - 1] * x.z;
        }
    }

    int degree_ = 0;
    CompiledPolynomial<T> f_;
    std::array<CompiledPolynomial<T>, 3> g_;
    std::array<CompiledPolynomial<T>, 6> h_;
};

}  // namespace atlas
