#pragma once

#include <array>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qkgeo/quat.hpp"

namespace qkgeo {

struct PreconditionError : std::domain_error {
    using std::domain_error::domain_error;
};

// Dense covariant 4-tensor on R^{4n}, n <= 3. Everything the pointwise
// curvature calculus needs is a plain loop over at most 12^4 entries; dense
// storage keeps each index manipulation a one-liner.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int dim) : d_(dim), a_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {
        check_dim4(dim, "Tensor4");
        if (dim > 12) throw std::invalid_argument("Tensor4: dimension cap is 12 (n <= 3)");
    }

    int dim() const { return d_; }

    double& operator()(int a, int b, int c, int e) {
        return a_[((static_cast<std::size_t>(a) * d_ + b) * d_ + c) * d_ + e];
    }
    double operator()(int a, int b, int c, int e) const {
        return a_[((static_cast<std::size_t>(a) * d_ + b) * d_ + c) * d_ + e];
    }

    Tensor4& operator+=(const Tensor4& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Tensor4& operator-=(const Tensor4& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Tensor4& operator*=(double c) {
        for (double& x : a_) x *= c;
        return *this;
    }
    friend Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
    friend Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
    friend Tensor4 operator*(double c, Tensor4 t) { return t *= c; }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int d_ = 0;
    std::vector<double> a_;
};

class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int dim) : d_(dim), a_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

    int dim() const { return d_; }
    double& operator()(int a, int b, int c) {
        return a_[(static_cast<std::size_t>(a) * d_ + b) * d_ + c];
    }
    double operator()(int a, int b, int c) const {
        return a_[(static_cast<std::size_t>(a) * d_ + b) * d_ + c];
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int d_ = 0;
    std::vector<double> a_;
};

// (Phi (x) Psi)(X,Y,Z,W) = Phi(X,Y) Psi(Z,W)
inline Tensor4 outer(const SqMat<double>& phi, const SqMat<double>& psi) {
    const int d = phi.size();
    Tensor4 t(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double pab = phi(a, b);
            if (pab == 0.0) continue;
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) t(a, b, c, e) = pab * psi(c, e);
        }
    return t;
}

// Pi R(X,Y,Z,W) = R(X,Y,Z,W) + R(Y,X,W,Z) - R(W,Z,X,Y) - R(Z,W,Y,X)
inline Tensor4 big_pi(const Tensor4& r) {
    const int d = r.dim();
    Tensor4 t(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    t(a, b, c, e) = r(a, b, c, e) + r(b, a, e, c) - r(e, c, a, b) - r(c, e, b, a);
    return t;
}

// tau R(X,Y,Z,W) = R(Y,Z,X,W)
inline Tensor4 tau_apply(const Tensor4& r) {
    const int d = r.dim();
    Tensor4 t(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) t(a, b, c, e) = r(b, c, a, e);
    return t;
}

// c(Phi,R)(X,Y,Z,W) = R(X,Y,Z,FW) with g(FX,Y) = Phi(X,Y). With the
// Euclidean block metric F = Phi^T; pass the chart metric for the general
// dualization.
inline Tensor4 contract_c(const BilinearForm& phi, const Tensor4& r) {
    const int d = r.dim();
    Tensor4 t(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int f = 0; f < d; ++f) s += r(a, b, c, f) * phi(e, f);
                    t(a, b, c, e) = s;
                }
    return t;
}

inline Tensor4 contract_c(const BilinearForm& phi, const Tensor4& r, const SqMat<double>& g) {
    const int d = r.dim();
    // F = g^{-1} Phi^T
    const SqMat<double> f = matmul(inverse(g), transpose(phi.matrix()));
    Tensor4 t(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int k = 0; k < d; ++k) s += r(a, b, c, k) * f(k, e);
                    t(a, b, c, e) = s;
                }
    return t;
}

// iota_X R = R(X, ., ., .)
inline Tensor3 iota_contract(const std::vector<double>& x, const Tensor4& r) {
    const int d = r.dim();
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("iota_contract: dimension mismatch");
    Tensor3 t(d);
    for (int a = 0; a < d; ++a) {
        if (x[a] == 0.0) continue;
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) t(b, c, e) += x[a] * r(a, b, c, e);
    }
    return t;
}

inline SqMat<double> iota_contract2(const std::vector<double>& x, const std::vector<double>& y,
                                    const Tensor4& r) {
    const int d = r.dim();
    SqMat<double> m(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double w = x[a] * y[b];
            if (w == 0.0) continue;
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) m(c, e) += w * r(a, b, c, e);
        }
    return m;
}

// Symmetry booking of a 4-tensor: each residual is max-norm relative to the
// largest entry, so the zero tensor passes everything.
struct TensorSymmetryProfile {
    double skew_first_pair = 0.0;
    double skew_second_pair = 0.0;
    double pair_symmetric = 0.0;
    double bianchi_first_three = 0.0;
    double hhermitian_first_pair = 0.0;
    double hhermitian_second_pair = 0.0;
    double tol = 1e-10;

    bool skew_first_pair_ok() const { return skew_first_pair <= tol; }
    bool skew_second_pair_ok() const { return skew_second_pair <= tol; }
    bool pair_symmetric_ok() const { return pair_symmetric <= tol; }
    bool bianchi_ok() const { return bianchi_first_three <= tol; }
    bool hhermitian_first_ok() const { return hhermitian_first_pair <= tol; }
    bool hhermitian_second_ok() const { return hhermitian_second_pair <= tol; }

    bool is_curvature() const {
        return skew_first_pair_ok() && skew_second_pair_ok() && pair_symmetric_ok() && bianchi_ok();
    }
    bool is_hyperkahler() const {
        return is_curvature() && hhermitian_first_ok() && hhermitian_second_ok();
    }

    std::string describe() const {
        std::ostringstream os;
        os << "skew12=" << skew_first_pair << " skew34=" << skew_second_pair
           << " pairsym=" << pair_symmetric << " bianchi=" << bianchi_first_three
           << " hherm12=" << hhermitian_first_pair << " hherm34=" << hhermitian_second_pair
           << " (tol " << tol << ")";
        return os.str();
    }
};

inline TensorSymmetryProfile symmetry_profile(const Tensor4& r, double tol = 1e-10) {
    const int d = r.dim();
    TensorSymmetryProfile p;
    p.tol = tol;
    const double scale = std::max(r.max_abs(), 1e-300);
    double s12 = 0.0, s34 = 0.0, ps = 0.0, bi = 0.0, h12 = 0.0, h34 = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    const double v = r(a, b, c, e);
                    s12 = std::max(s12, std::abs(v + r(b, a, c, e)));
                    s34 = std::max(s34, std::abs(v + r(a, b, e, c)));
                    ps = std::max(ps, std::abs(v - r(c, e, a, b)));
                    bi = std::max(bi, std::abs(v + r(b, c, a, e) + r(c, a, b, e)));
                    for (Axis ax : kAxes) {
                        const double sgn1 = structure_sign(ax, a) * structure_sign(ax, b);
                        const double sgn2 = structure_sign(ax, c) * structure_sign(ax, e);
                        h12 = std::max(h12, std::abs(sgn1 * r(structure_perm(ax, a), structure_perm(ax, b), c, e) - v));
                        h34 = std::max(h34, std::abs(sgn2 * r(a, b, structure_perm(ax, c), structure_perm(ax, e)) - v));
                    }
                }
    p.skew_first_pair = s12 / scale;
    p.skew_second_pair = s34 / scale;
    p.pair_symmetric = ps / scale;
    p.bianchi_first_three = bi / scale;
    p.hhermitian_first_pair = h12 / scale;
    p.hhermitian_second_pair = h34 / scale;
    return p;
}

inline TensorSymmetryProfile is_hyperkahler_curvature(const Tensor4& r, double tol = 1e-10) {
    return symmetry_profile(r, tol);
}

// pi R = 1/4 Pi R, valid when R is skew in the first pair and satisfies the
// first Bianchi identity.
inline Tensor4 pi_project(const Tensor4& r, double tol = 1e-10) {
    const TensorSymmetryProfile p = symmetry_profile(r, tol);
    if (!p.skew_first_pair_ok() || !p.bianchi_ok())
        throw PreconditionError("pi_project: input not admissible: " + p.describe());
    Tensor4 t = big_pi(r);
    t *= 0.25;
    return t;
}

// pi_h c(Phi,R) = 1/4 Pi c(Phi,R) for H-Hermitian Phi and hyper-Kahler-
// symmetric R (skew first pair + Bianchi + H-Hermitian in both pairs).
inline Tensor4 pi_h_c(const BilinearForm& phi, const Tensor4& r, double tol = 1e-10) {
    const TensorSymmetryProfile p = symmetry_profile(r, tol);
    if (!p.skew_first_pair_ok() || !p.bianchi_ok() || !p.hhermitian_first_ok() || !p.hhermitian_second_ok())
        throw PreconditionError("pi_h_c: tensor argument not admissible: " + p.describe());
    if (hhermitian_residual(phi) > tol * std::max(max_abs(phi.matrix()), 1e-300))
        throw PreconditionError("pi_h_c: form argument is not H-Hermitian");
    Tensor4 t = big_pi(contract_c(phi, r));
    t *= 0.25;
    return t;
}

// Projection of tau Phi (x) Psi onto algebraic curvature tensors. For skew
// inputs pi tau Phi (x) Psi = 1/12 (-2 (Phi (x) Psi + Psi (x) Phi) + Pi tau Phi (x) Psi),
// for symmetric inputs it is 1/4 Pi tau Phi (x) Psi.
inline Tensor4 pi_tau_outer(const BilinearForm& phi, const BilinearForm& psi) {
    const SymmetryTag tp = phi.tag(), ts = psi.tag();
    if (tp == SymmetryTag::skew && ts == SymmetryTag::skew) {
        Tensor4 t = big_pi(tau_apply(outer(phi.matrix(), psi.matrix())));
        t -= 2.0 * (outer(phi.matrix(), psi.matrix()) + outer(psi.matrix(), phi.matrix()));
        t *= 1.0 / 12.0;
        return t;
    }
    if (tp == SymmetryTag::symmetric && ts == SymmetryTag::symmetric) {
        Tensor4 t = big_pi(tau_apply(outer(phi.matrix(), psi.matrix())));
        t *= 0.25;
        return t;
    }
    throw PreconditionError("pi_tau_outer: inputs must be both skew or both symmetric");
}

// Projection onto hyper-Kahler curvature tensors of tau Phi (x) Psi for
// Phi, Psi in S^2 E:
//   pi_h tau Phi (x) Psi (X,Y,Z,W) =
//     1/24 ( -2 (Phi (x) Psi + Psi (x) Phi)(X,Y,Z,W)
//            + ((1 + L) iota_Y iota_X Pi tau Phi (x) Psi)(Z,W) ),
// the (1+L) acting on the (Z,W)-slice at fixed (X,Y).
inline bool in_s2e(const BilinearForm& f, double tol) {
    const double scale = max_abs(f.matrix());
    if (scale == 0.0) return true;  // the zero form sits in every summand
    return f.tag() == SymmetryTag::skew && hhermitian_residual(f) <= tol * scale;
}

inline Tensor4 pi_h_tau_outer(const BilinearForm& phi, const BilinearForm& psi, double tol = 1e-10) {
    const int d = phi.dim();
    if (!in_s2e(phi, tol) || !in_s2e(psi, tol))
        throw PreconditionError("pi_h_tau_outer: inputs must be skew and H-Hermitian (S^2 E)");

    const Tensor4 core = big_pi(tau_apply(outer(phi.matrix(), psi.matrix())));
    Tensor4 t(d);
    SqMat<double> slice(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) slice(c, e) = core(a, b, c, e);
            const SqMat<double> proj = slice + l_apply(slice);
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    t(a, b, c, e) = (proj(c, e) - 2.0 * (phi(a, b) * psi(c, e) + psi(a, b) * phi(c, e))) / 24.0;
        }
    return t;
}

// Model curvature tensor of the 4n-dimensional quaternionic projective
// space in the flat block chart:
//   R0(X,Y,Z,W) = 1/2 ((1 + L) iota_Y iota_X Pi tau g (x) g)(Z,W)
//                 - 2 (L X^flat (x) Z^flat)(Y,W).
// Its scalar curvature is 16 n (n+2); the calibration test pins the reading
// of both slice terms.
inline Tensor4 model_curvature_tensor(int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("model_curvature_tensor: n must be 1, 2 or 3");
    const int d = 4 * n;
    const SqMat<double> g = SqMat<double>::identity(d);
    const Tensor4 core = big_pi(tau_apply(outer(g, g)));

    Tensor4 r0(d);
    SqMat<double> slice(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) slice(c, e) = core(a, b, c, e);
            const SqMat<double> proj = slice + l_apply(slice);
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) r0(a, b, c, e) = 0.5 * proj(c, e);
        }
    // -2 L (e_a^flat (x) e_c^flat)(Y,W): L maps the elementary form
    // e_a (x) e_c to sum_A sign_A(a) sign_A(c) e_{A a} (x) e_{A c}.
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
            for (Axis ax : kAxes) {
                const double s = structure_sign(ax, a) * structure_sign(ax, c);
                const int pa = structure_perm(ax, a), pc = structure_perm(ax, c);
                r0(a, pa, c, pc) -= 2.0 * s;
            }
    return r0;
}

// s = sum_{ij} R(e_i, e_j, e_j, e_i) over the Euclidean frame.
inline double scalar_curvature_flat(const Tensor4& r) {
    const int d = r.dim();
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += r(i, j, j, i);
    return s;
}

// Ric(X,Y) = sum_i R(e_i, X, Y, e_i) over the Euclidean frame.
inline SqMat<double> ricci_flat(const Tensor4& r) {
    const int d = r.dim();
    SqMat<double> ric(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += r(i, a, b, i);
            ric(a, b) = s;
        }
    return ric;
}

struct SourceTerms {
    Tensor4 a1, a2, a3;
};

// The three algebraic source terms of the derivative identity for the
// hyper-Kahler curvature part:
//   A1 = -1/2 Pi c((1 + L) phi (x) phi, R'),
//   A2 = -Pi c(Phi, R'),
//   A3 = 12 pi_h tau Phi (x) Phi.
// Each output is again a hyper-Kahler curvature tensor.
inline SourceTerms derivative_source_terms(const std::vector<double>& phi, const BilinearForm& bphi,
                            const Tensor4& rprime, double tol = 1e-10) {
    const int d = rprime.dim();
    if (static_cast<int>(phi.size()) != d || bphi.dim() != d)
        throw std::invalid_argument("derivative_source_terms: dimension mismatch");
    const TensorSymmetryProfile p = symmetry_profile(rprime, tol);
    if (!p.is_hyperkahler())
        throw PreconditionError("derivative_source_terms: R' is not a hyper-Kahler curvature tensor: " + p.describe());
    if (!in_s2e(bphi, tol)) throw PreconditionError("derivative_source_terms: Phi must be skew and H-Hermitian");

    SqMat<double> pp(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) pp(i, j) = phi[i] * phi[j];
    const BilinearForm lpp(pp + l_apply(pp));

    SourceTerms out;
    out.a1 = big_pi(contract_c(lpp, rprime));
    out.a1 *= -0.5;
    out.a2 = big_pi(contract_c(bphi, rprime));
    out.a2 *= -1.0;
    out.a3 = pi_h_tau_outer(bphi, bphi, tol);
    out.a3 *= 12.0;
    return out;
}

}  // namespace qkgeo
