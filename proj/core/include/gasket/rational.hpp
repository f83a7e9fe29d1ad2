#pragma once

#include <gmpxx.h>

#include <string>

namespace gasket {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline Rational rational_pow(const Rational& base, unsigned exponent)
{
    Rational result(1);
    for (unsigned i = 0; i < exponent; ++i) {
        result *= base;
    }
    return result;
}

inline std::string numerator_string(const Rational& q) { return q.get_num().get_str(); }
inline std::string denominator_string(const Rational& q) { return q.get_den().get_str(); }

/// Converts an exact value to the scalar type used by a templated routine.
template <typename T>
T scalar_from(const Rational& q)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return q;
    } else {
        return static_cast<T>(q.get_d());
    }
}

}  // namespace gasket
