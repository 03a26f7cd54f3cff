#pragma once

#include <array>
#include <atomic>
#include <stdexcept>
#include <vector>

#include "qkgeo/linalg.hpp"

namespace qkgeo {

// Everything in this header lives on R^{4n} identified with H^n. The block
// layout is fixed once for the whole library: component 4*l+0 is the real
// part of the l-th quaternionic coordinate and components 4*l+1..3 are its
// i, j, k parts. The standard hypercomplex operators act by right
// multiplication with -i, -j, -k, which in this layout are constant
// sign/permutation maps, applied blockwise and never materialized unless a
// caller asks for the matrix.

enum class Axis : int { I = 0, J = 1, K = 2 };

constexpr std::array<Axis, 3> kAxes = {Axis::I, Axis::J, Axis::K};

namespace detail {

// image of block basis vector e_r under the operator: A e_r = sign * e_perm
constexpr int kPerm[3][4] = {
    {1, 0, 3, 2},  // I
    {2, 3, 0, 1},  // J
    {3, 2, 1, 0},  // K
};
constexpr double kSign[3][4] = {
    {-1.0, 1.0, 1.0, -1.0},
    {-1.0, -1.0, 1.0, 1.0},
    {-1.0, 1.0, -1.0, 1.0},
};

}  // namespace detail

// A e_a = structure_sign(A,a) * e_{structure_perm(A,a)} on the full R^{4n}.
inline int structure_perm(Axis a, int idx) {
    return (idx & ~3) + detail::kPerm[static_cast<int>(a)][idx & 3];
}
inline double structure_sign(Axis a, int idx) {
    return detail::kSign[static_cast<int>(a)][idx & 3];
}

inline void check_dim4(int dim, const char* who) {
    if (dim <= 0 || dim % 4 != 0)
        throw std::invalid_argument(std::string(who) + ": dimension must be a positive multiple of 4");
}

// Right quaternion multiplication by -i/-j/-k, blockwise.
template <class T>
std::vector<T> quat_apply(Axis a, const std::vector<T>& v) {
    check_dim4(static_cast<int>(v.size()), "quat_apply");
    std::vector<T> r(v.size(), T(0.0));
    for (int b = 0; b < static_cast<int>(v.size()); ++b) {
        // e_b contributes sign * v_b to slot perm(b)
        r[structure_perm(a, b)] = r[structure_perm(a, b)] + structure_sign(a, b) * v[b];
    }
    return r;
}

template <class T>
SqMat<T> standard_structure_matrix(Axis a, int dim) {
    check_dim4(dim, "standard_structure_matrix");
    SqMat<T> m(dim);
    for (int b = 0; b < dim; ++b) m(structure_perm(a, b), b) = T(structure_sign(a, b));
    return m;
}

template <class T>
std::array<SqMat<T>, 3> standard_structure_triple(int dim) {
    return {standard_structure_matrix<T>(Axis::I, dim), standard_structure_matrix<T>(Axis::J, dim),
            standard_structure_matrix<T>(Axis::K, dim)};
}

enum class SymmetryTag { symmetric, skew, general };

// Bilinear form on R^{4n} as a dense matrix B_{ab} = B(e_a, e_b), with a
// lazily determined symmetry tag (tolerance 1e-12 relative to the largest
// entry; operators that dispatch on symmetry consult the tag). The cache is
// a benign-race atomic so concurrent readers need no synchronization.
class BilinearForm {
public:
    BilinearForm() = default;
    explicit BilinearForm(int dim) : m_(dim) { check_dim4(dim, "BilinearForm"); }
    explicit BilinearForm(SqMat<double> m) : m_(std::move(m)) { check_dim4(m_.size(), "BilinearForm"); }

    BilinearForm(const BilinearForm& o) : m_(o.m_), tag_(o.tag_.load()) {}
    BilinearForm(BilinearForm&& o) noexcept : m_(std::move(o.m_)), tag_(o.tag_.load()) {}
    BilinearForm& operator=(const BilinearForm& o) {
        m_ = o.m_;
        tag_.store(o.tag_.load());
        return *this;
    }
    BilinearForm& operator=(BilinearForm&& o) noexcept {
        m_ = std::move(o.m_);
        tag_.store(o.tag_.load());
        return *this;
    }

    int dim() const { return m_.size(); }
    double& operator()(int i, int j) {
        tag_.store(kTagUnset);
        return m_(i, j);
    }
    double operator()(int i, int j) const { return m_(i, j); }
    const SqMat<double>& matrix() const { return m_; }

    SymmetryTag tag() const {
        int t = tag_.load(std::memory_order_relaxed);
        if (t == kTagUnset) {
            const double tol = 1e-12 * std::max(max_abs(m_), 1e-300);
            double sym = 0.0, skw = 0.0;
            for (int i = 0; i < m_.size(); ++i)
                for (int j = 0; j < m_.size(); ++j) {
                    sym = std::max(sym, std::abs(m_(i, j) - m_(j, i)));
                    skw = std::max(skw, std::abs(m_(i, j) + m_(j, i)));
                }
            t = static_cast<int>(sym <= tol ? SymmetryTag::symmetric
                                            : (skw <= tol ? SymmetryTag::skew : SymmetryTag::general));
            tag_.store(t, std::memory_order_relaxed);
        }
        return static_cast<SymmetryTag>(t);
    }

    friend BilinearForm operator+(const BilinearForm& a, const BilinearForm& b) {
        return BilinearForm(a.m_ + b.m_);
    }
    friend BilinearForm operator-(const BilinearForm& a, const BilinearForm& b) {
        return BilinearForm(a.m_ - b.m_);
    }
    friend BilinearForm operator*(double c, const BilinearForm& b) { return BilinearForm(c * b.m_); }

private:
    static constexpr int kTagUnset = -1;
    SqMat<double> m_;
    mutable std::atomic<int> tag_{kTagUnset};
};

// B(A.,A.) for one standard structure; the building block of L.
template <class T>
SqMat<T> conjugate_by_structure(Axis a, const SqMat<T>& b) {
    const int n = b.size();
    SqMat<T> r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r(i, j) = (structure_sign(a, i) * structure_sign(a, j)) *
                      b(structure_perm(a, i), structure_perm(a, j));
    return r;
}

// L = I (x) I + J (x) J + K (x) K acting on bilinear forms:
// (L B)(X,Y) = B(IX,IY) + B(JX,JY) + B(KX,KY).
template <class T>
SqMat<T> l_apply(const SqMat<T>& b) {
    SqMat<T> r(b.size());
    for (Axis a : kAxes) r += conjugate_by_structure(a, b);
    return r;
}
inline BilinearForm l_apply(const BilinearForm& b) { return BilinearForm(l_apply(b.matrix())); }

// Same operator with an arbitrary structure triple (chart-dependent I,J,K),
// usable on jet scalars: (L B) = sum_A A^T B A.
template <class T>
SqMat<T> l_apply(const SqMat<T>& b, const std::array<SqMat<T>, 3>& structure) {
    SqMat<T> r(b.size());
    for (const auto& s : structure) r += matmul(transpose(s), matmul(b, s));
    return r;
}

// Projector onto H-Hermitian forms, 1/4 (1 + L).
inline BilinearForm project_hhermitian(const BilinearForm& b) {
    SqMat<double> r = b.matrix() + l_apply(b.matrix());
    r *= 0.25;
    return BilinearForm(r);
}

template <class T>
SqMat<T> project_hhermitian(const SqMat<T>& b, const std::array<SqMat<T>, 3>& structure) {
    SqMat<T> r = b + l_apply(b, structure);
    r *= T(0.25);
    return r;
}

// max_A |B(A.,A.) - B| in the max norm.
inline double hhermitian_residual(const BilinearForm& b) {
    double r = 0.0;
    for (Axis a : kAxes) r = std::max(r, max_abs(conjugate_by_structure(a, b.matrix()) - b.matrix()));
    return r;
}

inline bool is_hhermitian(const BilinearForm& b, double tol) {
    return hhermitian_residual(b) <= tol;
}

// Quaternion with scalar-generic components; used where a computation is
// easier to state in H than through the block maps (the metric transcription
// oracles, notably).
template <class T>
struct Quaternion {
    T w{}, x{}, y{}, z{};

    friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
        return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }
    Quaternion conj() const { return {w, -x, -y, -z}; }
    T real() const { return w; }
};

}  // namespace qkgeo
