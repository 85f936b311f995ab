#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace affswor {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational arithmetic. cpp_rational keeps values in canonical form:
/// reduced to lowest terms, denominator > 0.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(int n) {
    if (n < 0) throw std::domain_error("factorial: negative argument");
    BigInt r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);  // exact at every step: r is C(n, i+1) * remaining partial
    }
    return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline std::string to_fraction_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

/// Parses "num/den", plain integers, and decimal strings ("0.415" -> 415/1000),
/// with an optional exponent ("1.5e-3"). Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("parse_rational: malformed rational '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash)), den(text.substr(slash + 1));
        if (num.empty() || den.empty()) fail();
        try {
            return Rational{BigInt(num), BigInt(den)};
        } catch (const std::exception&) {
            fail();
        }
    }
    // decimal form: [sign] digits [. digits] [eE [sign] digits]
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') neg = (text[pos++] == '-');
    BigInt mantissa = 0;
    long scale = 0;  // power of ten dividing the mantissa
    bool seen_digit = false, seen_dot = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) ++scale;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if ((c == 'e' || c == 'E') && seen_digit) {
            long expo = 0;
            bool eneg = false;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) eneg = (text[pos++] == '-');
            if (pos >= text.size()) fail();
            for (; pos < text.size(); ++pos) {
                if (text[pos] < '0' || text[pos] > '9') fail();
                expo = expo * 10 + (text[pos] - '0');
                if (expo > 10000) fail();
            }
            scale += eneg ? expo : -expo;
            break;
        } else {
            fail();
        }
    }
    if (!seen_digit) fail();
    Rational q(mantissa);
    if (scale > 0) {
        BigInt d = 1;
        for (long i = 0; i < scale; ++i) d *= 10;
        q /= Rational(d);
    } else if (scale < 0) {
        BigInt m = 1;
        for (long i = 0; i < -scale; ++i) m *= 10;
        q *= Rational(m);
    }
    return neg ? -q : q;
}

/// Arithmetic-mode traits for the dual rational/float instantiations.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* mode_name = "rational";
    static Rational from_rational(const Rational& q) { return q; }
    static bool is_one(const Rational& v) { return v == 1; }
    static bool is_nonnegative(const Rational& v) { return v >= 0; }
    /// Exact mode never clamps.
    static Rational clamp_probability(const Rational& v) { return v; }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* mode_name = "float";
    static constexpr double normalization_tol = 1e-12;
    static constexpr double nonnegativity_tol = 1e-10;
    static double from_rational(const Rational& q) { return to_double(q); }
    static bool is_one(double v) { return std::abs(v - 1.0) <= normalization_tol; }
    static bool is_nonnegative(double v) { return v >= -nonnegativity_tol; }
    /// Rounding noise in [-1e-10, 0] collapses to an exact zero.
    static double clamp_probability(double v) { return (v < 0.0 && v >= -nonnegativity_tol) ? 0.0 : v; }
};

template <class S>
S frac(long long num, long long den) {
    if constexpr (ScalarTraits<S>::exact)
        return Rational(num, den);
    else
        return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace affswor
