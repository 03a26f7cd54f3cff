#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace qkgeo {

// Forward-mode dual number carrying a runtime-sized vector of partials.
// Nesting (Jet<Jet<double>>) yields exact second derivatives of any
// composition of the overloaded operations, third derivatives at the next
// level, and so on. A jet with an empty partial vector is a constant and
// broadcasts against any width, so plain literals mix freely with seeded
// variables.
template <class T>
struct Jet {
    T v{};
    std::vector<T> d;

    Jet() = default;
    Jet(double c) : v(c) {}  // NOLINT: implicit constant lift is the point

    std::size_t width() const { return d.size(); }
};

using J1 = Jet<double>;
using J2 = Jet<J1>;
using J3 = Jet<J2>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Jet<T>& x) {
    return value_of(x.v);
}

namespace detail {

template <class T>
std::size_t joint_width(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t wa = a.width(), wb = b.width();
    assert(wa == 0 || wb == 0 || wa == wb);
    return wa > wb ? wa : wb;
}

}  // namespace detail

template <class T>
Jet<T> operator-(const Jet<T>& a) {
    Jet<T> r;
    r.v = -a.v;
    r.d.reserve(a.d.size());
    for (const T& p : a.d) r.d.push_back(-p);
    return r;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t w = detail::joint_width(a, b);
    Jet<T> r;
    r.v = a.v + b.v;
    r.d.resize(w, T(0.0));
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = r.d[i] + a.d[i];
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] = r.d[i] + b.d[i];
    return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t w = detail::joint_width(a, b);
    Jet<T> r;
    r.v = a.v - b.v;
    r.d.resize(w, T(0.0));
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = r.d[i] + a.d[i];
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] = r.d[i] - b.d[i];
    return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t w = detail::joint_width(a, b);
    Jet<T> r;
    r.v = a.v * b.v;
    r.d.resize(w, T(0.0));
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = r.d[i] + a.d[i] * b.v;
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] = r.d[i] + a.v * b.d[i];
    return r;
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t w = detail::joint_width(a, b);
    Jet<T> r;
    r.v = a.v / b.v;
    r.d.resize(w, T(0.0));
    // d(a/b) = (da - (a/b) db) / b
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = r.d[i] + a.d[i];
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] = r.d[i] - r.v * b.d[i];
    for (std::size_t i = 0; i < w; ++i) r.d[i] = r.d[i] / b.v;
    return r;
}

// double <-> Jet mixed arithmetic without paying for a widened temporary
template <class T>
Jet<T> operator+(const Jet<T>& a, double c) {
    Jet<T> r = a;
    r.v = r.v + T(c);
    return r;
}
template <class T>
Jet<T> operator+(double c, const Jet<T>& a) {
    return a + c;
}
template <class T>
Jet<T> operator-(const Jet<T>& a, double c) {
    return a + (-c);
}
template <class T>
Jet<T> operator-(double c, const Jet<T>& a) {
    return -(a - c);
}
template <class T>
Jet<T> operator*(const Jet<T>& a, double c) {
    Jet<T> r;
    r.v = a.v * T(c);
    r.d.reserve(a.d.size());
    for (const T& p : a.d) r.d.push_back(p * T(c));
    return r;
}
template <class T>
Jet<T> operator*(double c, const Jet<T>& a) {
    return a * c;
}
template <class T>
Jet<T> operator/(const Jet<T>& a, double c) {
    return a * (1.0 / c);
}
template <class T>
Jet<T> operator/(double c, const Jet<T>& a) {
    return Jet<T>(c) / a;
}

using std::exp;
using std::log;
using std::sqrt;

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
    Jet<T> r;
    r.v = sqrt(a.v);
    r.d.reserve(a.d.size());
    const T half_inv = T(0.5) / r.v;
    for (const T& p : a.d) r.d.push_back(p * half_inv);
    return r;
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
    Jet<T> r;
    r.v = exp(a.v);
    r.d.reserve(a.d.size());
    for (const T& p : a.d) r.d.push_back(p * r.v);
    return r;
}

template <class T>
Jet<T> log(const Jet<T>& a) {
    Jet<T> r;
    r.v = log(a.v);
    r.d.reserve(a.d.size());
    for (const T& p : a.d) r.d.push_back(p / a.v);
    return r;
}

template <class T>
T sq(const T& x) {
    return x * x;
}

// Partial k of a jet; constants (empty partial vector) differentiate to zero.
template <class T>
T jet_partial(const Jet<T>& j, std::size_t k) {
    return k < j.d.size() ? j.d[k] : T(0.0);
}

// Promote a point one derivative level, seeding dx_i/dx_j = delta_ij.
template <class T>
std::vector<Jet<T>> seed_point(const std::vector<T>& x) {
    const std::size_t n = x.size();
    std::vector<Jet<T>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].v = x[i];
        out[i].d.assign(n, T(0.0));
        out[i].d[i] = T(1.0);
    }
    return out;
}

}  // namespace qkgeo
