#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "qkgeo/chart.hpp"
#include "qkgeo/tensor4.hpp"

namespace qkgeo {

template <class T>
struct Rank3 {
    Rank3() = default;
    explicit Rank3(int dim) : d_(dim), a_(static_cast<std::size_t>(dim) * dim * dim, T(0.0)) {}
    int dim() const { return d_; }
    T& operator()(int k, int i, int j) { return a_[(static_cast<std::size_t>(k) * d_ + i) * d_ + j]; }
    const T& operator()(int k, int i, int j) const {
        return a_[(static_cast<std::size_t>(k) * d_ + i) * d_ + j];
    }

private:
    int d_ = 0;
    std::vector<T> a_;
};

// Metric, inverse and Christoffel symbols at a point, at any jet level.
template <class T>
struct ConnectionData {
    SqMat<T> g;
    SqMat<T> ginv;
    Rank3<T> gamma;  // Gamma^k_{ij}, symmetric in (i,j)
};

// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij); the metric
// derivatives come from evaluating the chart one jet level up, so they are
// exact to rounding.
template <class T>
ConnectionData<T> christoffel_at(const MetricChart& chart, const std::vector<T>& x) {
    const int d = chart.dim();
    const auto gj = chart.metric(seed_point(x));
    ConnectionData<T> out;
    out.g = SqMat<T>(d);
    Rank3<T> dg(d);  // dg(k,i,j) = d_k g_ij
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            out.g(i, j) = gj(i, j).v;
            for (int k = 0; k < d; ++k) dg(k, i, j) = jet_partial(gj(i, j), k);
        }
    out.ginv = inverse(out.g);
    out.gamma = Rank3<T>(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                T s(0.0);
                for (int l = 0; l < d; ++l)
                    s = s + out.ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                s = 0.5 * s;
                out.gamma(k, i, j) = s;
                out.gamma(k, j, i) = s;
            }
    return out;
}

// Double-level entry point with the singularity guard.
inline ConnectionData<double> christoffel(const MetricChart& chart, const Point& p,
                                          double cond_limit = 1e12) {
    auto conn = christoffel_at<double>(chart, p);
    if (sym_condition_number(conn.g) > cond_limit)
        throw ChartError("christoffel: metric of chart '" + chart.name +
                         "' is numerically singular at the requested point");
    return conn;
}

// Fully lowered curvature tensor R(X,Y,Z,W) = g(R(X,Y)Z, W) with
// R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
inline Tensor4 riemann(const MetricChart& chart, const Point& p) {
    const int d = chart.dim();
    const auto cj = christoffel_at<J1>(chart, seed_point(p));
    Tensor4 r(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < d; ++k) {
                // R^m_{ijk}, then lower the last index
                for (int l = 0; l < d; ++l) {
                    double up = 0.0;
                    for (int m = 0; m < d; ++m) {
                        double rm = jet_partial(cj.gamma(m, j, k), i) - jet_partial(cj.gamma(m, i, k), j);
                        for (int s = 0; s < d; ++s)
                            rm += cj.gamma(m, i, s).v * cj.gamma(s, j, k).v -
                                  cj.gamma(m, j, s).v * cj.gamma(s, i, k).v;
                        up += rm * cj.g(m, l).v;
                    }
                    r(i, j, k, l) = up;
                    r(j, i, k, l) = -up;
                }
            }
    return r;
}

inline SqMat<double> ricci_from(const Tensor4& r, const SqMat<double>& ginv) {
    const int d = r.dim();
    SqMat<double> ric(d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                for (int l = 0; l < d; ++l) s += ginv(i, l) * r(i, j, k, l);
            ric(j, k) = s;
        }
    return ric;
}

inline double scalar_from(const SqMat<double>& ric, const SqMat<double>& ginv) {
    double s = 0.0;
    for (int j = 0; j < ric.size(); ++j)
        for (int k = 0; k < ric.size(); ++k) s += ginv(j, k) * ric(j, k);
    return s;
}

// nu = s / (4 n (n+2)); constant over the chart exactly when the metric is
// Einstein, which every chart in the zoo is.
inline double reduced_scalar(const MetricChart& chart, const Point& p) {
    const auto conn = christoffel_at<double>(chart, p);
    const Tensor4 r = riemann(chart, p);
    const double s = scalar_from(ricci_from(r, conn.ginv), conn.ginv);
    const int n = chart.n;
    return s / (4.0 * n * (n + 2));
}

// Omega_A = A^T g as matrices: Omega_A(X,Y) = g(AX, Y).
template <class T>
SqMat<T> kahler_form_at(const MetricChart& chart, const std::vector<T>& x, Axis which) {
    const auto st = chart.structure(x);
    const auto g = chart.metric(x);
    return matmul(transpose(st[static_cast<int>(which)]), g);
}

inline BilinearForm kahler_form(const MetricChart& chart, const Point& p, Axis which) {
    return BilinearForm(kahler_form_at<double>(chart, p, which));
}

// (nabla_m A)^k_j = d_m A^k_j + Gamma^k_{ml} A^l_j - Gamma^l_{mj} A^k_l
// for each structure endomorphism; the derivative of the structure field
// comes from one jet level up (identically zero for constant structures).
template <class T>
std::array<std::vector<SqMat<T>>, 3> nabla_structure_at(const MetricChart& chart,
                                                        const std::vector<T>& x,
                                                        const ConnectionData<T>& conn) {
    const int d = chart.dim();
    const auto stj = chart.structure(seed_point(x));
    std::array<std::vector<SqMat<T>>, 3> out;
    for (int a = 0; a < 3; ++a) {
        out[a].assign(d, SqMat<T>(d));
        for (int m = 0; m < d; ++m) {
            SqMat<T>& na = out[a][m];
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) {
                    T s = jet_partial(stj[a](k, j), m);
                    for (int l = 0; l < d; ++l)
                        s = s + conn.gamma(k, m, l) * stj[a](l, j).v -
                            conn.gamma(l, m, j) * stj[a](k, l).v;
                    na(k, j) = s;
                }
        }
    }
    return out;
}

template <class T>
struct AbcForms {
    std::vector<T> a, b, c;
};

// The three connection 1-forms of the structure bundle, extracted by trace
// pairing from nabla I and nabla J:
//   nabla_X I = c(X) J - b(X) K,
//   nabla_X J = a(X) K - c(X) I,
//   nabla_X K = b(X) I - a(X) J.
template <class T>
AbcForms<T> connection_abc_at(const MetricChart& chart, const std::vector<T>& x,
                              const std::array<std::vector<SqMat<T>>, 3>& nabla) {
    const int d = chart.dim();
    const auto st = chart.structure(x);
    AbcForms<T> out;
    out.a.assign(d, T(0.0));
    out.b.assign(d, T(0.0));
    out.c.assign(d, T(0.0));
    for (int m = 0; m < d; ++m) {
        T tr_j_ni(0.0), tr_k_ni(0.0), tr_k_nj(0.0);
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                tr_j_ni = tr_j_ni + st[1](k, l) * nabla[0][m](l, k);
                tr_k_ni = tr_k_ni + st[2](k, l) * nabla[0][m](l, k);
                tr_k_nj = tr_k_nj + st[2](k, l) * nabla[1][m](l, k);
            }
        out.c[m] = (-1.0 / d) * tr_j_ni;
        out.b[m] = (1.0 / d) * tr_k_ni;
        out.a[m] = (-1.0 / d) * tr_k_nj;
    }
    return out;
}

struct ConnectionForms {
    std::vector<double> a, b, c;
    double reconstruction_residual = 0.0;  // max |nabla A - reconstruction|
};

inline ConnectionForms connection_abc(const MetricChart& chart, const Point& p) {
    const int d = chart.dim();
    const auto conn = christoffel_at<double>(chart, p);
    const auto nabla = nabla_structure_at<double>(chart, p, conn);
    const auto abc = connection_abc_at<double>(chart, p, nabla);
    const auto st = chart.structure<double>(p);

    ConnectionForms out;
    out.a = abc.a;
    out.b = abc.b;
    out.c = abc.c;
    double res = 0.0;
    for (int m = 0; m < d; ++m) {
        SqMat<double> ri = nabla[0][m] - (abc.c[m] * st[1] - abc.b[m] * st[2]);
        SqMat<double> rj = nabla[1][m] - (abc.a[m] * st[2] - abc.c[m] * st[0]);
        SqMat<double> rk = nabla[2][m] - (abc.b[m] * st[0] - abc.a[m] * st[1]);
        res = std::max({res, max_abs(ri), max_abs(rj), max_abs(rk)});
    }
    out.reconstruction_residual = res;
    return out;
}

// Lee form phi = 1/2 I d* Omega_I with the codifferential
// (d* Omega)(X) = -sum_i (nabla_{e_i} Omega)(e_i, X) over a g-orthonormal
// frame; the frame sum contracts to g^{mi} in coordinates.
template <class T>
std::vector<T> lee_form_at(const MetricChart& chart, const std::vector<T>& x) {
    const int d = chart.dim();
    const auto conn = christoffel_at<T>(chart, x);
    const auto omj = kahler_form_at<Jet<T>>(chart, seed_point(x), Axis::I);
    const auto st = chart.structure(x);
    const auto& imat = st[0];

    // (nabla_m Omega)_{ij} = d_m Omega_ij - Gamma^k_{mi} Omega_kj - Gamma^k_{mj} Omega_ik
    std::vector<T> dstar(d, T(0.0));
    for (int j = 0; j < d; ++j) {
        T s(0.0);
        for (int m = 0; m < d; ++m)
            for (int i = 0; i < d; ++i) {
                T nab = jet_partial(omj(i, j), m);
                for (int k = 0; k < d; ++k)
                    nab = nab - conn.gamma(k, m, i) * omj(k, j).v - conn.gamma(k, m, j) * omj(i, k).v;
                s = s + conn.ginv(m, i) * nab;
            }
        dstar[j] = -1.0 * s;
    }
    // (I psi)_j = -sum_k I^k_j psi_k
    std::vector<T> phi(d, T(0.0));
    for (int j = 0; j < d; ++j) {
        T s(0.0);
        for (int k = 0; k < d; ++k) s = s + imat(k, j) * dstar[k];
        phi[j] = -0.5 * s;
    }
    return phi;
}

inline std::vector<double> lee_form(const MetricChart& chart, const Point& p) {
    return lee_form_at<double>(chart, p);
}

// Independent route for the same 1-form: phi(X) = 1/2 trace { I (nabla_. I) X },
// i.e. phi_j = 1/2 sum_{m,l} I^m_l (nabla_m I)^l_j. Used as a cross-check.
inline std::vector<double> lee_form_trace_route(const MetricChart& chart, const Point& p) {
    const int d = chart.dim();
    const auto conn = christoffel_at<double>(chart, p);
    const auto nabla = nabla_structure_at<double>(chart, p, conn);
    const auto st = chart.structure<double>(p);
    std::vector<double> phi(d, 0.0);
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int m = 0; m < d; ++m)
            for (int l = 0; l < d; ++l) s += st[0](m, l) * nabla[0][m](l, j);
        phi[j] = 0.5 * s;
    }
    return phi;
}

template <class T>
std::vector<T> xi_at(const MetricChart& chart, const std::vector<T>& x) {
    const auto conn = christoffel_at<T>(chart, x);
    return matvec(conn.ginv, lee_form_at<T>(chart, x));
}

template <class T>
T lee_norm2_at(const MetricChart& chart, const std::vector<T>& x) {
    const int d = chart.dim();
    const auto conn = christoffel_at<T>(chart, x);
    const auto phi = lee_form_at<T>(chart, x);
    T s(0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s = s + conn.ginv(i, j) * phi[i] * phi[j];
    return s;
}

// g-orthonormal frame adapted to the structure triple: blocks
// (v, -Iv, -Jv, -Kv), so that in frame indices the metric is the identity
// and I, J, K are the standard block maps. Columns of the result are the
// frame vectors; deterministic (candidates are the coordinate vectors in
// order).
inline SqMat<double> adapted_frame(const SqMat<double>& g,
                                   const std::array<SqMat<double>, 3>& st) {
    const int d = g.size();
    SqMat<double> frame(d);
    std::vector<std::vector<double>> cols;
    cols.reserve(d);
    const auto gdot = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += u[i] * g(i, j) * v[j];
        return s;
    };
    for (int cand = 0; cand < d && static_cast<int>(cols.size()) < d; ++cand) {
        std::vector<double> v(d, 0.0);
        v[cand] = 1.0;
        for (const auto& f : cols) {
            const double c = gdot(v, f);
            for (int i = 0; i < d; ++i) v[i] -= c * f[i];
        }
        const double nn = gdot(v, v);
        if (nn < 1e-20) continue;
        const double inv = 1.0 / std::sqrt(nn);
        for (double& x : v) x *= inv;
        cols.push_back(v);
        for (const auto& s : st) {
            std::vector<double> av = matvec(s, v);
            for (double& x : av) x = -x;
            cols.push_back(av);
        }
    }
    if (static_cast<int>(cols.size()) != d)
        throw ChartError("adapted_frame: failed to complete a quaternionic frame");
    for (int c = 0; c < d; ++c)
        for (int i = 0; i < d; ++i) frame(i, c) = cols[c][i];
    return frame;
}

// T_{abcd} = R_{xyzw} M^x_a M^y_b M^z_c M^w_d, one slot at a time.
inline Tensor4 tensor4_pullback(const Tensor4& r, const SqMat<double>& m) {
    const int d = r.dim();
    Tensor4 t1(d), t2(d), t3(d), t4(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int x = 0; x < d; ++x) s += r(x, b, c, e) * m(x, a);
                    t1(a, b, c, e) = s;
                }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int x = 0; x < d; ++x) s += t1(a, x, c, e) * m(x, b);
                    t2(a, b, c, e) = s;
                }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int x = 0; x < d; ++x) s += t2(a, b, x, e) * m(x, c);
                    t3(a, b, c, e) = s;
                }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    double s = 0.0;
                    for (int x = 0; x < d; ++x) s += t3(a, b, c, x) * m(x, e);
                    t4(a, b, c, e) = s;
                }
    return t4;
}

// The model curvature tensor expressed in chart coordinates at p: build the
// flat-model tensor in an adapted orthonormal frame and pull it back.
inline Tensor4 model_curvature_at(const MetricChart& chart, const Point& p) {
    const auto g = chart.metric<double>(p);
    const auto st = chart.structure<double>(p);
    const SqMat<double> frame = adapted_frame(g, st);
    const SqMat<double> finv = matmul(transpose(frame), g);  // F^T g = F^{-1}
    return tensor4_pullback(model_curvature_tensor(chart.n), finv);
}

}  // namespace qkgeo
