#pragma once

#include <array>
#include <cstddef>
#include <type_traits>

#include "gasket/rational.hpp"

namespace gasket {

template <typename T>
using Vec3 = std::array<T, 3>;

/// Dense 3x3 matrix, row major. Only what the harmonic calculus needs.
template <typename T>
struct Mat3 {
    std::array<std::array<T, 3>, 3> a{};

    static Mat3 identity()
    {
        Mat3 m;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                m.a[i][j] = (i == j) ? T(1) : T(0);
            }
        }
        return m;
    }

    T& operator()(std::size_t i, std::size_t j) { return a[i][j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a[i][j]; }

    Mat3 transposed() const
    {
        Mat3 t;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                t.a[i][j] = a[j][i];
            }
        }
        return t;
    }

    T trace() const { return a[0][0] + a[1][1] + a[2][2]; }

    template <typename U>
    Mat3<U> cast() const
    {
        Mat3<U> out;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if constexpr (std::is_same_v<U, T>) {
                    out.a[i][j] = a[i][j];
                } else if constexpr (std::is_floating_point_v<U>) {
                    out.a[i][j] = static_cast<U>(to_double(a[i][j]));
                } else {
                    out.a[i][j] = U(a[i][j]);
                }
            }
        }
        return out;
    }

    friend bool operator==(const Mat3& x, const Mat3& y) { return x.a == y.a; }
};

template <typename T>
Mat3<T> operator*(const Mat3<T>& x, const Mat3<T>& y)
{
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            T s = x.a[i][0] * y.a[0][j];
            s += x.a[i][1] * y.a[1][j];
            s += x.a[i][2] * y.a[2][j];
            r.a[i][j] = s;
        }
    }
    return r;
}

template <typename T>
Vec3<T> operator*(const Mat3<T>& m, const Vec3<T>& v)
{
    Vec3<T> r;
    for (std::size_t i = 0; i < 3; ++i) {
        T s = m.a[i][0] * v[0];
        s += m.a[i][1] * v[1];
        s += m.a[i][2] * v[2];
        r[i] = s;
    }
    return r;
}

template <typename T>
T dot(const Vec3<T>& x, const Vec3<T>& y)
{
    T s = x[0] * y[0];
    s += x[1] * y[1];
    s += x[2] * y[2];
    return s;
}

}  // namespace gasket
