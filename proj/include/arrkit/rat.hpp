#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace arrkit {

// Exact arbitrary-precision rational scalar. Everything in this library is
// computed over Q; no floating point anywhere.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r)
{
    const Int num = numerator(r), den = denominator(r);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

// Accepts "p", "-p", "p/q".
inline Rat rat_parse(const std::string& s)
{
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Rat(Int(s));
        const Int num(s.substr(0, slash));
        const Int den(s.substr(slash + 1));
        if (den == 0)
            throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

} // namespace arrkit
