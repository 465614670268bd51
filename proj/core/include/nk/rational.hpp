#pragma once

#include <gmpxx.h>

#include <string>

namespace nk {

// Exact arithmetic for the enumeration and recursion routines.  Keeping
// every path probability as a reduced fraction lets the published closed
// forms be checked for equality instead of closeness.
using Rational = mpq_class;

// Canonical "numerator/denominator" rendering; integers print without the
// "/1" suffix ("1/21", "3").
inline std::string to_fraction_string(const Rational& q) {
    return q.get_str();
}

inline double to_double(const Rational& q) {
    return q.get_d();
}

} // namespace nk
