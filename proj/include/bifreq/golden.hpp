#pragma once

// Exact arithmetic in the quadratic field Q(sqrt 5).
//
// A GoldenNumber is a + b*sqrt5 with a, b reduced rationals. Equality is
// structural, ordering is exact, and floor never goes through an unchecked
// float conversion.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace bifreq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline int sign_of(const Rational& r) { return r.sign(); }

inline BigInt floor_div(const BigInt& num, const BigInt& den)
{
    // den > 0
    BigInt q = num / den;
    if (num % den != 0 && num.sign() < 0) --q;
    return q;
}

inline BigInt rational_floor(const Rational& r)
{
    return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline std::string rational_to_string(const Rational& r)
{
    const BigInt& d = boost::multiprecision::denominator(r);
    std::string s = boost::multiprecision::numerator(r).str();
    if (d != 1) s += "/" + d.str();
    return s;
}

} // namespace detail

class GoldenNumber {
public:
    GoldenNumber() = default;
    GoldenNumber(std::int64_t n) : m_a(n) {}
    GoldenNumber(Rational a, Rational b = Rational(0)) : m_a(std::move(a)), m_b(std::move(b)) {}

    static GoldenNumber sqrt5() { return {Rational(0), Rational(1)}; }
    static GoldenNumber fraction(std::int64_t num, std::int64_t den) { return {Rational(num, den)}; }

    /// Rational part a of a + b*sqrt5.
    const Rational& rational_part() const { return m_a; }
    /// Coefficient b of sqrt5.
    const Rational& surd_part() const { return m_b; }

    bool is_rational() const { return m_b == 0; }
    bool is_integer() const { return is_rational() && boost::multiprecision::denominator(m_a) == 1; }

    GoldenNumber conjugate() const { return {m_a, -m_b}; }

    /// Field norm a^2 - 5 b^2; zero only for the zero element.
    Rational norm() const { return m_a * m_a - 5 * m_b * m_b; }

    GoldenNumber inverse() const
    {
        if (sign() == 0) throw std::domain_error("GoldenNumber: division by zero");
        Rational n = norm();
        return {m_a / n, -m_b / n};
    }

    /// Exact sign of a + b*sqrt5. When a and b disagree in sign the larger of
    /// a^2 and 5b^2 decides; they cannot be equal since sqrt5 is irrational.
    int sign() const
    {
        const int sa = detail::sign_of(m_a);
        const int sb = detail::sign_of(m_b);
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        return (m_a * m_a > 5 * m_b * m_b) ? sa : sb;
    }

    /// The unique integer n with n <= x < n + 1.
    BigInt floor() const
    {
        if (is_rational()) return detail::rational_floor(m_a);
        BigInt seed = floor_seed();
        // Exact correction against the integer candidates around the seed.
        while (*this < GoldenNumber(Rational(seed))) --seed;
        while (!(*this < GoldenNumber(Rational(seed + 1)))) ++seed;
        return seed;
    }

    BigInt ceil() const { return -(-*this).floor(); }

    long double to_long_double() const
    {
        return m_a.convert_to<long double>() + m_b.convert_to<long double>() * std::sqrt(5.0L);
    }

    /// Renders as "a", "b*sqrt5" or "a + b*sqrt5" with fractions written p/q.
    std::string to_string() const
    {
        if (m_b == 0) return detail::rational_to_string(m_a);
        std::string surd = detail::rational_to_string(abs_rational(m_b)) + "*sqrt5";
        if (m_a == 0) return (m_b.sign() < 0 ? "-" : "") + surd;
        return detail::rational_to_string(m_a) + (m_b.sign() < 0 ? " - " : " + ") + surd;
    }

    GoldenNumber operator-() const { return {-m_a, -m_b}; }

    GoldenNumber& operator+=(const GoldenNumber& y)
    {
        m_a += y.m_a;
        m_b += y.m_b;
        return *this;
    }
    GoldenNumber& operator-=(const GoldenNumber& y)
    {
        m_a -= y.m_a;
        m_b -= y.m_b;
        return *this;
    }
    GoldenNumber& operator*=(const GoldenNumber& y)
    {
        Rational a = m_a * y.m_a + 5 * m_b * y.m_b;
        Rational b = m_a * y.m_b + m_b * y.m_a;
        m_a = std::move(a);
        m_b = std::move(b);
        return *this;
    }
    GoldenNumber& operator/=(const GoldenNumber& y) { return *this *= y.inverse(); }

    friend GoldenNumber operator+(GoldenNumber x, const GoldenNumber& y) { return x += y; }
    friend GoldenNumber operator-(GoldenNumber x, const GoldenNumber& y) { return x -= y; }
    friend GoldenNumber operator*(GoldenNumber x, const GoldenNumber& y) { return x *= y; }
    friend GoldenNumber operator/(GoldenNumber x, const GoldenNumber& y) { return x /= y; }

    friend bool operator==(const GoldenNumber& x, const GoldenNumber& y)
    {
        return x.m_a == y.m_a && x.m_b == y.m_b;
    }

    friend std::strong_ordering operator<=>(const GoldenNumber& x, const GoldenNumber& y)
    {
        const int s = (x - y).sign();
        if (s < 0) return std::strong_ordering::less;
        if (s > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const GoldenNumber& x) { return os << x.to_string(); }

private:
    static Rational abs_rational(const Rational& r) { return r.sign() < 0 ? Rational(-r) : r; }

    // Starting point for floor(). For moderate magnitudes the long double
    // estimate is within one of the answer. Otherwise use the integer square
    // root: with x = (p + q*sqrt5)/d, floor(q*sqrt5) is +-isqrt(5q^2) (minus one
    // when q < 0) and floor(x) = floor((p + floor(q*sqrt5)) / d).
    BigInt floor_seed() const
    {
        const long double approx = to_long_double();
        if (std::isfinite(approx) && std::fabs(approx) < 0x1p60L) {
            return BigInt(static_cast<std::int64_t>(std::floor(approx)));
        }
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        const BigInt d = boost::multiprecision::lcm(denominator(m_a), denominator(m_b));
        const BigInt p = numerator(m_a) * (d / denominator(m_a));
        const BigInt q = numerator(m_b) * (d / denominator(m_b));
        BigInt root = boost::multiprecision::sqrt(BigInt(5 * q * q));
        BigInt surd_floor = q.sign() > 0 ? root : BigInt(-root - 1);
        return detail::floor_div(p + surd_floor, d);
    }

    Rational m_a{0};
    Rational m_b{0};
};

inline GoldenNumber floor_as_golden(const GoldenNumber& x) { return GoldenNumber(Rational(x.floor())); }

/// Constants of the R0-competitive construction.
struct GoldenConstants {
    GoldenNumber phi;   // (1 + sqrt5) / 2
    GoldenNumber alpha; // R0 - 1
    GoldenNumber beta;  // alpha / 2
    GoldenNumber rho;   // beta / phi
    GoldenNumber r0;    // (18 - sqrt5) / 11
};

inline const GoldenConstants& constants()
{
    static const GoldenConstants c = [] {
        GoldenConstants k;
        k.phi = GoldenNumber(Rational(1, 2), Rational(1, 2));
        k.r0 = GoldenNumber(Rational(18, 11), Rational(-1, 11));
        k.alpha = k.r0 - 1;
        k.beta = k.alpha / 2;
        k.rho = k.beta / k.phi;
        return k;
    }();
    return c;
}

/// floor(c * n) for a fixed constant c and machine-sized n.
///
/// The constant is stored as (x + y*sqrt5)/d over 64-bit integers and the
/// floor is computed with an exact 128-bit integer square root. Values that do
/// not fit fall back to GoldenNumber::floor().
class ScaledFloor {
public:
    explicit ScaledFloor(GoldenNumber c) : m_c(std::move(c))
    {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        const BigInt d = boost::multiprecision::lcm(denominator(m_c.rational_part()), denominator(m_c.surd_part()));
        const BigInt x = numerator(m_c.rational_part()) * (d / denominator(m_c.rational_part()));
        const BigInt y = numerator(m_c.surd_part()) * (d / denominator(m_c.surd_part()));
        const BigInt limit = BigInt(1) << 31;
        if (abs(x) < limit && abs(y) < limit && d < limit) {
            m_x = x.convert_to<std::int64_t>();
            m_y = y.convert_to<std::int64_t>();
            m_d = d.convert_to<std::int64_t>();
            m_fast = true;
        }
    }

    const GoldenNumber& constant() const { return m_c; }

    std::int64_t operator()(std::int64_t n) const
    {
        constexpr std::int64_t fast_limit = std::int64_t(1) << 30;
        if (m_fast && n > -fast_limit && n < fast_limit) return fast(n);
        return (m_c * GoldenNumber(n)).floor().convert_to<std::int64_t>();
    }

private:
    using i128 = __int128;
    using u128 = unsigned __int128;

    static u128 isqrt(u128 v)
    {
        u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(v)));
        while (r * r > v) --r;
        while ((r + 1) * (r + 1) <= v) ++r;
        return r;
    }

    std::int64_t fast(std::int64_t n) const
    {
        const i128 p = static_cast<i128>(m_x) * n;
        const i128 q = static_cast<i128>(m_y) * n;
        i128 surd_floor = 0;
        if (q != 0) {
            const u128 mag = static_cast<u128>(q < 0 ? -q : q);
            const i128 root = static_cast<i128>(isqrt(5 * mag * mag));
            surd_floor = q > 0 ? root : -root - 1;
        }
        const i128 num = p + surd_floor;
        i128 quot = num / m_d;
        if (num % m_d != 0 && num < 0) --quot;
        return static_cast<std::int64_t>(quot);
    }

    GoldenNumber m_c;
    std::int64_t m_x = 0, m_y = 0, m_d = 1;
    bool m_fast = false;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Recursive-descent parser for exact numbers:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | atom
//   atom   := integer | decimal | 'sqrt5' | 'phi' | 'R0' | '(' expr ')'
class GoldenParser {
public:
    explicit GoldenParser(std::string_view text) : m_text(text) {}

    GoldenNumber parse()
    {
        GoldenNumber v = expr();
        skip_ws();
        if (m_pos != m_text.size()) fail("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("cannot parse exact number '" + std::string(m_text) + "': " + what + " at offset " +
                         std::to_string(m_pos));
    }

    void skip_ws()
    {
        while (m_pos < m_text.size() && (m_text[m_pos] == ' ' || m_text[m_pos] == '\t')) ++m_pos;
    }

    bool accept(char c)
    {
        skip_ws();
        if (m_pos < m_text.size() && m_text[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    bool accept_word(std::string_view w)
    {
        skip_ws();
        if (m_text.substr(m_pos, w.size()) == w) {
            m_pos += w.size();
            return true;
        }
        return false;
    }

    GoldenNumber expr()
    {
        GoldenNumber v = term();
        for (;;) {
            if (accept('+')) v += term();
            else if (accept('-')) v -= term();
            else return v;
        }
    }

    GoldenNumber term()
    {
        GoldenNumber v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                GoldenNumber d = unary();
                if (d.sign() == 0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    GoldenNumber unary()
    {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return atom();
    }

    GoldenNumber atom()
    {
        skip_ws();
        if (accept('(')) {
            GoldenNumber v = expr();
            if (!accept(')')) fail("expected ')'");
            return v;
        }
        if (accept_word("sqrt5")) return GoldenNumber::sqrt5();
        if (accept_word("phi")) return constants().phi;
        if (accept_word("R0")) return constants().r0;
        return number();
    }

    GoldenNumber number()
    {
        const std::size_t start = m_pos;
        while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos]))) ++m_pos;
        std::string whole(m_text.substr(start, m_pos - start));
        std::string frac;
        if (m_pos < m_text.size() && m_text[m_pos] == '.') {
            ++m_pos;
            const std::size_t fstart = m_pos;
            while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos]))) ++m_pos;
            frac = std::string(m_text.substr(fstart, m_pos - fstart));
            if (frac.empty()) fail("expected digits after '.'");
        }
        if (whole.empty() && frac.empty()) fail("expected a number");
        BigInt num(whole.empty() ? std::string("0") : whole);
        BigInt den(1);
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        return GoldenNumber(Rational(num, den));
    }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

} // namespace detail

/// Parses integers, decimals, fractions and expressions over sqrt5, e.g.
/// "3/2", "1.42", "(18-sqrt5)/11", "18/11 - 1/11*sqrt5" or the token "R0".
inline GoldenNumber parse_golden(std::string_view text) { return detail::GoldenParser(text).parse(); }

} // namespace bifreq
