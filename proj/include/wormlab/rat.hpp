#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wormlab {

// Exact rational coordinates for the parallelogram construction. Nesting and
// adjacency are exact equalities there; floats enter only at the geometry
// module boundary.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow2(int e) {
    if (e >= 0) return Rat(BigInt(1) << e);
    return Rat(1, BigInt(1) << (-e));
}

// "num/den" with den > 0, gcd-reduced (cpp_rational keeps it canonical).
inline std::string rat_string(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
    return Rat(num, den);
}

}  // namespace wormlab
