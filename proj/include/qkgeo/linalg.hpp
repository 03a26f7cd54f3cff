#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkgeo/jet.hpp"

namespace qkgeo {

// Dense square matrix over an arbitrary scalar (double or a Jet level).
// Sizes here never exceed 12 (quaternionic dimension cap n <= 3).
template <class T>
class SqMat {
public:
    SqMat() = default;
    explicit SqMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, T(0.0)) {}

    static SqMat identity(int n) {
        SqMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }

    int size() const { return n_; }

    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    SqMat& operator+=(const SqMat& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] = a_[k] + o.a_[k];
        return *this;
    }
    SqMat& operator-=(const SqMat& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] = a_[k] - o.a_[k];
        return *this;
    }
    template <class S>
    SqMat& operator*=(const S& c) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] = a_[k] * c;
        return *this;
    }

    friend SqMat operator+(SqMat a, const SqMat& b) { return a += b; }
    friend SqMat operator-(SqMat a, const SqMat& b) { return a -= b; }

private:
    int n_ = 0;
    std::vector<T> a_;
};

template <class T, class S>
SqMat<T> operator*(const S& c, SqMat<T> m) {
    m *= c;
    return m;
}

template <class T>
SqMat<T> matmul(const SqMat<T>& a, const SqMat<T>& b) {
    const int n = a.size();
    SqMat<T> r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const T& aik = a(i, k);
            for (int j = 0; j < n; ++j) r(i, j) = r(i, j) + aik * b(k, j);
        }
    return r;
}

template <class T>
SqMat<T> transpose(const SqMat<T>& a) {
    const int n = a.size();
    SqMat<T> r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = a(j, i);
    return r;
}

template <class T>
std::vector<T> matvec(const SqMat<T>& a, const std::vector<T>& x) {
    const int n = a.size();
    std::vector<T> r(n, T(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] = r[i] + a(i, j) * x[j];
    return r;
}

inline double max_abs(const SqMat<double>& a) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-Jordan inverse with partial pivoting on the scalar value part.
template <class T>
SqMat<T> inverse(const SqMat<T>& a) {
    const int n = a.size();
    SqMat<T> m = a;
    SqMat<T> inv = SqMat<T>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(value_of(m(col, col)));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(value_of(m(r, col)));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best == 0.0) throw SingularMatrixError("singular matrix in inverse()");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const T p = m(col, col);
        for (int j = 0; j < n; ++j) {
            m(col, j) = m(col, j) / p;
            inv(col, j) = inv(col, j) / p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = m(r, col);
            if (value_of(f) == 0.0 && f.width() == 0) continue;
            for (int j = 0; j < n; ++j) {
                m(r, j) = m(r, j) - f * m(col, j);
                inv(r, j) = inv(r, j) - f * inv(col, j);
            }
        }
    }
    return inv;
}

template <>
inline SqMat<double> inverse(const SqMat<double>& a) {
    const int n = a.size();
    SqMat<double> m = a;
    SqMat<double> inv = SqMat<double>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(m(r, col));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best == 0.0) throw SingularMatrixError("singular matrix in inverse()");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const double p = m(col, col);
        for (int j = 0; j < n; ++j) {
            m(col, j) /= p;
            inv(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> sym_eigenvalues(const SqMat<double>& a0) {
    const int n = a0.size();
    SqMat<double> a = a0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Ratio of extreme absolute eigenvalues of a symmetric matrix.
inline double sym_condition_number(const SqMat<double>& a) {
    const auto ev = sym_eigenvalues(a);
    double lo = std::abs(ev.front()), hi = 0.0;
    for (double e : ev) {
        lo = std::min(lo, std::abs(e));
        hi = std::max(hi, std::abs(e));
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace qkgeo
