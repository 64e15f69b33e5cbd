#include "atlas/poly.hpp"

#include <cctype>
#include <sstream>

namespace atlas {

Polynomial::Polynomial(TermMap terms) : terms_(std::move(terms)) { normalize(); }

void Polynomial::normalize()
{
    degree_ = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0) {
            it = terms_.erase(it);
            continue;
        }
        degree_ = std::max(degree_, it->first[0] + it->first[1] + it->first[2]);
        ++it;
    }
}

Polynomial Polynomial::constant(const Rational& c)
{
    TermMap t;
    t[{0, 0, 0}] = c;
    return Polynomial(std::move(t));
}

Polynomial Polynomial::variable(int index)
{
    TermMap t;
    Exponent e{0, 0, 0};
    e.at(index) = 1;
    t[e] = 1;
    return Polynomial(std::move(t));
}

bool Polynomial::depends_on(int var) const
{
    for (const auto& [e, c] : terms_)
        if (e[var] > 0) return true;
    return false;
}

Rational Polynomial::coefficient(const Exponent& e) const
{
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::max_abs_coefficient() const
{
    Rational m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, Rational(abs(c)));
    return m;
}

Polynomial Polynomial::operator-() const
{
    TermMap t = terms_;
    for (auto& [e, c] : t) c = -c;
    return Polynomial(std::move(t));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    auto t = a.terms_;
    for (const auto& [e, c] : b.terms_) t[e] += c;
    return Polynomial(std::move(t));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    Polynomial::TermMap t;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) t[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
    return Polynomial(std::move(t));
}

Polynomial Polynomial::pow(unsigned n) const
{
    Polynomial result = constant(1);
    Polynomial base = *this;
    while (n) {
        if (n & 1u) result = result * base;
        n >>= 1u;
        if (n) base = base * base;
    }
    return result;
}

Polynomial Polynomial::derivative(int var) const
{
    TermMap t;
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent d = e;
        d[var] -= 1;
        t[d] += c * e[var];
    }
    return Polynomial(std::move(t));
}

Polynomial Polynomial::translate(const std::array<Rational, 3>& shift) const
{
    std::array<Polynomial, 3> sub;
    for (int i = 0; i < 3; ++i) sub[i] = variable(i) + constant(shift[i]);
    Polynomial out;
    for (const auto& [e, c] : terms_) out = out + constant(c) * sub[0].pow(e[0]) * sub[1].pow(e[1]) * sub[2].pow(e[2]);
    return out;
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)), position_(position)
{
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Polynomial parse()
    {
        Polynomial p = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
        return p;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        Polynomial p = term();
        for (;;) {
            if (accept('+')) p = p + term();
            else if (accept('-')) p = p - term();
            else return p;
        }
    }

    Polynomial term()
    {
        Polynomial p = unary();
        while (accept('*')) p = p * unary();
        return p;
    }

    Polynomial unary()
    {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power()
    {
        Polynomial base = primary();
        if (!accept('^')) return base;
        skip();
        std::size_t start = pos_;
        std::string digits = integer_digits();
        if (digits.empty()) throw ParseError("expected non-negative integer exponent", start);
        if (digits.size() > 3 || std::stoi(digits) > 64) throw ParseError("exponent too large", start);
        return base.pow(static_cast<unsigned>(std::stoi(digits)));
    }

    std::string integer_digits()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Polynomial primary()
    {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Polynomial::constant(literal());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string_view name = s_.substr(start, pos_ - start);
            if (name == "x") return Polynomial::variable(0);
            if (name == "y") return Polynomial::variable(1);
            if (name == "z") return Polynomial::variable(2);
            throw ParseError("unknown variable '" + std::string(name) + "'", start);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    Rational literal()
    {
        std::size_t start = pos_;
        std::string num = integer_digits();
        if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
            throw ParseError("non-rational literal (write p/q)", start);
        Rational value{boost::multiprecision::mpz_int(num)};
        std::size_t save = pos_;
        skip();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            skip();
            std::size_t dstart = pos_;
            std::string den = integer_digits();
            if (den.empty()) throw ParseError("expected integer denominator", dstart);
            if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
                throw ParseError("non-rational literal (write p/q)", dstart);
            boost::multiprecision::mpz_int d(den);
            if (d == 0) throw ParseError("zero denominator", dstart);
            return value / Rational(d);
        }
        pos_ = save;
        return value;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text) { return Parser(text).parse(); }

Rational parse_rational(std::string_view text)
{
    Polynomial p = parse_polynomial(text);
    if (!p.is_constant()) throw ParseError("expected a rational constant", 0);
    return p.coefficient({0, 0, 0});
}

Rational evaluate(const Polynomial& p, const std::array<Rational, 3>& x)
{
    Rational s = 0;
    for (const auto& [e, c] : p.terms()) {
        Rational t = c;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        s += t;
    }
    return s;
}

double evaluate(const Polynomial& p, const std::array<double, 3>& x, EvalMode mode)
{
    if (mode == EvalMode::exact) {
        std::array<Rational, 3> q;
        for (int i = 0; i < 3; ++i) {
            if (!std::isfinite(x[i])) throw EvaluationError("exact evaluation requires a rational point");
            q[i] = Rational(x[i]);
        }
        return evaluate(p, q).convert_to<double>();
    }
    return PolyField<double>(p).value({x[0], x[1], x[2]});
}

std::array<Polynomial, 3> gradient(const Polynomial& p) { return {p.derivative(0), p.derivative(1), p.derivative(2)}; }

std::array<std::array<Polynomial, 3>, 3> hessian(const Polynomial& p)
{
    std::array<std::array<Polynomial, 3>, 3> h;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            h[i][j] = p.derivative(i).derivative(j);
            h[j][i] = h[i][j];
        }
    return h;
}

Vec3d Center::as_double() const { return {a[0].convert_to<double>(), a[1].convert_to<double>(), a[2].convert_to<double>()}; }

Vec3q Center::as_quad() const { return {rational_to<quad>(a[0]), rational_to<quad>(a[1]), rational_to<quad>(a[2])}; }

std::array<Polynomial, 3> polar_minors(const Polynomial& p, const Center& a)
{
    auto g = gradient(p);
    std::array<Polynomial, 3> d;
    for (int i = 0; i < 3; ++i) d[i] = Polynomial::variable(i) - Polynomial::constant(a.a[i]);
    return {d[1] * g[2] - d[2] * g[1], d[2] * g[0] - d[0] * g[2], d[0] * g[1] - d[1] * g[0]};
}

std::string to_string(const Rational& q)
{
    if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

std::string to_string(const Polynomial& p)
{
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    static const char* names = "xyz";
    for (const auto& [e, c] : p.terms()) {
        Rational mag = abs(c);
        bool neg = c < 0;
        if (first) out << (neg ? "-" : "");
        else out << (neg ? " - " : " + ");
        first = false;
        bool unit = e != Exponent{0, 0, 0} && mag == 1;
        bool need_star = false;
        if (!unit) {
            bool frac = boost::multiprecision::denominator(mag) != 1;
            out << (frac ? "(" : "") << to_string(mag) << (frac ? ")" : "");
            need_star = true;
        }
        for (int i = 0; i < 3; ++i) {
            if (e[i] == 0) continue;
            if (need_star) out << "*";
            out << names[i];
            if (e[i] > 1) out << "^" << e[i];
            need_star = true;
        }
    }
    return out.str();
}

nlohmann::json to_json(const Polynomial& p)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"e", {e[0], e[1], e[2]}}, {"c", to_string(c)}});
    return {{"terms", terms}};
}

Polynomial polynomial_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw ParseError("polynomial JSON needs a \"terms\" array", 0);
    Polynomial::TermMap t;
    for (const auto& term : j["terms"]) {
        const auto& e = term.at("e");
        if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ParseError("exponent must have 2 or 3 entries", 0);
        Exponent ex{0, 0, 0};
        for (std::size_t i = 0; i < e.size(); ++i) {
            int v = e[i].get<int>();
            if (v < 0) throw ParseError("negative exponent", 0);
            ex[i] = v;
        }
        const auto& c = term.at("c");
        Rational q = c.is_string() ? parse_rational(c.get<std::string>()) : Rational(c.get<long long>());
        t[ex] += q;
    }
    return Polynomial(std::move(t));
}

Polynomial read_polynomial_text(std::string_view text)
{
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
        }
        return polynomial_from_json(j);
    }
    return parse_polynomial(text);
}

}  // namespace atlas
