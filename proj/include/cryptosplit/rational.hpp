#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptosplit {

/// Exact arbitrary-precision fraction. mpq_class keeps values in reduced form
/// with a positive denominator once canonicalize() has run; every helper here
/// that builds a Rational from text canonicalizes it.
using Rational = mpq_class;

inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto const begin = s.find_first_not_of(" \t");
    auto const end = s.find_last_not_of(" \t");
    if (begin == std::string::npos)
        throw std::invalid_argument("empty rational");
    s = s.substr(begin, end - begin + 1);

    // Decimal notation ("0.25", "-1.5e-3" is not supported).
    if (auto dot = s.find('.'); dot != std::string::npos) {
        if (s.find('/') != std::string::npos)
            throw std::invalid_argument("malformed rational: " + s);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t const scale = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("malformed rational: " + s);
        Rational r;
        if (r.get_num().set_str(digits[0] == '+' ? digits.substr(1) : digits, 10) != 0)
            throw std::invalid_argument("malformed rational: " + s);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
        r.get_den() = den;
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0 || r.get_den() == 0)
        throw std::invalid_argument("malformed rational: " + s);
    r.canonicalize();
    return r;
}

/// Always "p/q", including "3/1" for integers.
inline std::string to_fraction_string(Rational const& r)
{
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Shortest form: "3" for integers, "p/q" otherwise.
inline std::string to_string(Rational const& r) { return r.get_str(); }

inline double to_double(Rational const& r) { return r.get_d(); }

inline bool is_integer(Rational const& r) { return r.get_den() == 1; }

/// Decimal rendering with `digits` significant digits.
inline std::string to_decimal(Rational const& r, int digits = 12)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, r.get_d());
    return buf;
}

} // namespace cryptosplit
