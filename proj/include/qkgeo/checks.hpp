#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qkgeo/geometry.hpp"

namespace qkgeo {

enum class CheckStatus { passed, failed, degenerate };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::passed: return "passed";
        case CheckStatus::failed: return "failed";
        default: return "skipped-degenerate";
    }
}

// One identity evaluated at one chart point.
struct CheckResult {
    std::string identity;
    Point point;
    double residual = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::passed;

    bool pass() const { return status != CheckStatus::failed; }
};

inline CheckResult make_check(std::string identity, Point p, double residual, double tol) {
    CheckResult r;
    r.identity = std::move(identity);
    r.point = std::move(p);
    r.residual = residual;
    r.tolerance = tol;
    r.status = residual <= tol ? CheckStatus::passed : CheckStatus::failed;
    return r;
}

inline CheckResult make_degenerate(std::string identity, Point p, double tol) {
    CheckResult r;
    r.identity = std::move(identity);
    r.point = std::move(p);
    r.residual = 0.0;
    r.tolerance = tol;
    r.status = CheckStatus::degenerate;
    return r;
}

// Residuals are max-norm differences divided by the larger side, floored at
// one, so identities between small quantities are judged absolutely and
// identities between large ones relatively.
inline double rel_residual(double diff, double scale_a, double scale_b = 0.0) {
    return diff / std::max({scale_a, scale_b, 1.0});
}

namespace detail {

inline SqMat<double> wedge11(const std::vector<double>& a, const std::vector<double>& b) {
    const int d = static_cast<int>(a.size());
    SqMat<double> m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[i] * b[j] - a[j] * b[i];
    return m;
}

inline SqMat<double> outer11(const std::vector<double>& a, const std::vector<double>& b) {
    const int d = static_cast<int>(a.size());
    SqMat<double> m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[i] * b[j];
    return m;
}

// apply a structure endomorphism to a covector: (A psi)_j = -sum_k A^k_j psi_k
template <class T>
std::vector<T> structure_on_covector(const SqMat<T>& a, const std::vector<T>& psi) {
    const int d = a.size();
    std::vector<T> r(d, T(0.0));
    for (int j = 0; j < d; ++j) {
        T s(0.0);
        for (int k = 0; k < d; ++k) s = s + a(k, j) * psi[k];
        r[j] = -1.0 * s;
    }
    return r;
}

inline std::vector<double> jet_values(const std::vector<J1>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].v;
    return r;
}

// covariant derivative of a covector field given its jet:
// (nabla lam)_{ij} = d_i lam_j - Gamma^k_{ij} lam_k
inline SqMat<double> nabla_covector(const std::vector<J1>& lam, const ConnectionData<double>& conn) {
    const int d = conn.g.size();
    SqMat<double> r(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = jet_partial(lam[j], i);
            for (int k = 0; k < d; ++k) s -= conn.gamma(k, i, j) * lam[k].v;
            r(i, j) = s;
        }
    return r;
}

inline SqMat<double> d_covector(const std::vector<J1>& lam) {
    const int d = static_cast<int>(lam.size());
    SqMat<double> r(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r(i, j) = jet_partial(lam[j], i) - jet_partial(lam[i], j);
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// chart contract

// Quaternionic identities, orthogonality of the structure triple for the
// chart metric, and positive definiteness.
inline std::vector<CheckResult> chart_contract(const MetricChart& chart, const Point& p,
                                               double tol = 1e-10) {
    const int d = chart.dim();
    const auto g = chart.metric<double>(p);
    const auto st = chart.structure<double>(p);

    double quat = 0.0;
    for (int a = 0; a < 3; ++a) {
        SqMat<double> sq = matmul(st[a], st[a]);
        for (int i = 0; i < d; ++i) sq(i, i) += 1.0;
        quat = std::max(quat, max_abs(sq));
    }
    quat = std::max(quat, max_abs(matmul(st[0], st[1]) - st[2]));
    quat = std::max(quat, max_abs(matmul(st[1], st[2]) - st[0]));
    quat = std::max(quat, max_abs(matmul(st[2], st[0]) - st[1]));

    double orth = 0.0;
    for (int a = 0; a < 3; ++a)
        orth = std::max(orth, max_abs(matmul(transpose(st[a]), matmul(g, st[a])) - g));

    const auto ev = sym_eigenvalues(g);
    const double spd = ev.front() <= 0.0 ? 1.0 : 0.0;

    std::vector<CheckResult> out;
    out.push_back(make_check("structure_quaternion_identities", p, quat, tol));
    out.push_back(make_check("structure_orthogonality", p, rel_residual(orth, max_abs(g)), tol));
    out.push_back(make_check("metric_positive_definite", p, spd, 0.5));
    return out;
}

inline CheckResult einstein_check(const MetricChart& chart, const Point& p, double tol = 1e-8) {
    const auto conn = christoffel_at<double>(chart, p);
    const Tensor4 r = riemann(chart, p);
    const SqMat<double> ric = ricci_from(r, conn.ginv);
    const double s = scalar_from(ric, conn.ginv);
    const double f = s / chart.dim();
    const SqMat<double> diff = ric - f * conn.g;
    return make_check("einstein", p, max_abs(diff) / std::max(max_abs(conn.g), 1e-300), tol);
}

inline CheckResult riemann_symmetry_check(const MetricChart& chart, const Point& p,
                                          double tol = 1e-10) {
    const Tensor4 r = riemann(chart, p);
    const auto prof = symmetry_profile(r, tol);
    const double res = std::max({prof.skew_first_pair, prof.skew_second_pair, prof.pair_symmetric,
                                 prof.bianchi_first_three});
    return make_check("riemann_symmetries", p, res, tol);
}

// ---------------------------------------------------------------------------
// structure-bundle identities

// d Omega_A against (Omega_I, Omega_J, Omega_K) paired with the so(3)
// connection matrix of 1-forms:
//   d Omega_I = Omega_J ^ c - Omega_K ^ b   (and cyclic).
inline CheckResult check_kahler_differentials(const MetricChart& chart, const Point& p, double tol = 1e-8) {
    const int d = chart.dim();
    const auto xj = seed_point(p);
    std::array<SqMat<J1>, 3> omj;
    std::array<SqMat<double>, 3> om;
    for (int a = 0; a < 3; ++a) {
        omj[a] = kahler_form_at<J1>(chart, xj, static_cast<Axis>(a));
        om[a] = SqMat<double>(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) om[a](i, j) = omj[a](i, j).v;
    }
    const auto forms = connection_abc(chart, p);
    const std::array<const std::vector<double>*, 3> abc = {&forms.a, &forms.b, &forms.c};

    // rhs pairing: dOmega_a = Omega_{a+1} ^ abc[a+2] - Omega_{a+2} ^ abc[a+1]
    double res = 0.0, scale = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (int k = j + 1; k < d; ++k) {
                    const double dom = jet_partial(omj[a](j, k), i) - jet_partial(omj[a](i, k), j) +
                                       jet_partial(omj[a](i, j), k);
                    const auto wedge = [&](const SqMat<double>& w, const std::vector<double>& u) {
                        return w(i, j) * u[k] - w(i, k) * u[j] + w(j, k) * u[i];
                    };
                    const double rhs = wedge(om[a1], *abc[a2]) - wedge(om[a2], *abc[a1]);
                    res = std::max(res, std::abs(dom - rhs));
                    scale = std::max({scale, std::abs(dom), std::abs(rhs)});
                }
    }
    return make_check("kahler_form_differentials", p, rel_residual(res, scale), tol);
}

// Curvature of the structure connection:
//   (da + b ^ c, db + c ^ a, dc + a ^ b) = -nu (Omega_I, Omega_J, Omega_K).
inline CheckResult check_connection_curvature(const MetricChart& chart, const Point& p, double tol = 1e-7) {
    const auto xj = seed_point(p);
    const auto connj = christoffel_at<J1>(chart, xj);
    const auto nablaj = nabla_structure_at<J1>(chart, xj, connj);
    const auto abcj = connection_abc_at<J1>(chart, xj, nablaj);
    const double nu = reduced_scalar(chart, p);

    const std::array<const std::vector<J1>*, 3> abc = {&abcj.a, &abcj.b, &abcj.c};
    double res = 0.0, scale = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
        const SqMat<double> da = detail::d_covector(*abc[a]);
        const SqMat<double> wedge =
            detail::wedge11(detail::jet_values(*abc[a1]), detail::jet_values(*abc[a2]));
        const SqMat<double> om = kahler_form_at<double>(chart, p, static_cast<Axis>(a));
        const SqMat<double> lhs = da + wedge;
        const SqMat<double> rhs = -nu * om;
        res = std::max(res, max_abs(lhs - rhs));
        scale = std::max({scale, max_abs(lhs), max_abs(rhs)});
    }
    return make_check("structure_connection_curvature", p, rel_residual(res, scale), tol);
}

// ---------------------------------------------------------------------------
// Lee form identities

struct LeeDerivativeData {
    SqMat<double> nabla_phi;
    SqMat<double> half_dphi;
    std::vector<double> phi;
    double nu = 0.0;
};

inline LeeDerivativeData lee_derivative_data(const MetricChart& chart, const Point& p) {
    LeeDerivativeData out;
    const auto conn = christoffel_at<double>(chart, p);
    const auto phij = lee_form_at<J1>(chart, seed_point(p));
    out.phi = detail::jet_values(phij);
    out.nabla_phi = detail::nabla_covector(phij, conn);
    out.half_dphi = 0.5 * detail::d_covector(phij);
    out.nu = reduced_scalar(chart, p);
    return out;
}

// nabla phi = 1/2 ((-1 + L) phi (x) phi - nu g) + 1/2 dphi, and the trace
// identity d* phi = 2 n nu - |phi|^2 that follows from it.
inline std::vector<CheckResult> check_lee_derivative(const MetricChart& chart, const Point& p,
                                           double tol = 1e-7) {
    const int d = chart.dim();
    const auto conn = christoffel_at<double>(chart, p);
    const auto st = chart.structure<double>(p);
    const auto data = lee_derivative_data(chart, p);

    const SqMat<double> pp = detail::outer11(data.phi, data.phi);
    SqMat<double> rhs = l_apply(pp, st) - pp - data.nu * conn.g;
    rhs *= 0.5;
    rhs += data.half_dphi;
    const double res = max_abs(data.nabla_phi - rhs);
    const double scale = std::max(max_abs(data.nabla_phi), max_abs(rhs));

    double dstar = 0.0, phi2 = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            dstar -= conn.ginv(i, j) * data.nabla_phi(i, j);
            phi2 += conn.ginv(i, j) * data.phi[i] * data.phi[j];
        }
    const double rhs44 = 2.0 * chart.n * data.nu - phi2;

    std::vector<CheckResult> out;
    out.push_back(make_check("lee_covariant_derivative", p, rel_residual(res, scale), tol));
    out.push_back(make_check("lee_codifferential_trace", p,
                             rel_residual(std::abs(dstar - rhs44), std::abs(dstar), std::abs(rhs44)),
                             tol));
    return out;
}

// ---------------------------------------------------------------------------
// curvature split

struct CurvatureSplit {
    Tensor4 remainder;
    double nu = 0.0;
    double riemann_scale = 0.0;
};

// Split off the model part of the curvature: the remainder
// R' = R - 1/4 nu (model tensor at p), the model expressed in chart
// coordinates through an adapted orthonormal frame. Requires an Einstein
// chart.
inline CurvatureSplit curvature_split(const MetricChart& chart, const Point& p,
                                      double einstein_tol = 1e-6) {
    const CheckResult ec = einstein_check(chart, p, einstein_tol);
    if (!ec.pass())
        throw ChartError("curvature_split: chart '" + chart.name +
                         "' is not Einstein to tolerance at the requested point");
    CurvatureSplit out;
    const Tensor4 r = riemann(chart, p);
    out.nu = reduced_scalar(chart, p);
    out.remainder = r - 0.25 * out.nu * model_curvature_at(chart, p);
    out.riemann_scale = std::max(r.max_abs(), 1.0);
    return out;
}

inline std::vector<CheckResult> remainder_checks(const MetricChart& chart, const Point& p,
                                                 bool expect_zero, bool closed_lee,
                                                 double tol_hk = 1e-8, double tol_slice = 1e-8,
                                                 double tol_zero = 1e-7) {
    const CurvatureSplit data = curvature_split(chart, p);
    std::vector<CheckResult> out;

    const auto prof = symmetry_profile(data.remainder, tol_hk);
    // residuals here are relative to the full curvature scale, not to R'
    const double hk_res =
        std::max({prof.skew_first_pair, prof.skew_second_pair, prof.pair_symmetric,
                  prof.bianchi_first_three, prof.hhermitian_first_pair, prof.hhermitian_second_pair}) *
        std::max(data.remainder.max_abs(), 1e-300) / data.riemann_scale;
    out.push_back(make_check("rprime_hyperkahler", p, hk_res, tol_hk));

    if (closed_lee) {
        const auto xi = xi_at<double>(chart, p);
        const Tensor3 slice = iota_contract(xi, data.remainder);  // R'(xi, ., ., .) up to symmetry
        double smax = 0.0;
        const int d = chart.dim();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) {
                    double s = 0.0;
                    for (int e = 0; e < d; ++e) s += data.remainder(a, b, c, e) * xi[e];
                    smax = std::max(smax, std::abs(s));
                }
        smax = std::max(smax, slice.max_abs());
        out.push_back(make_check("rprime_xi_slice", p, smax / data.riemann_scale, tol_slice));
    }
    if (expect_zero)
        out.push_back(
            make_check("rprime_vanishes", p, data.remainder.max_abs() / data.riemann_scale, tol_zero));
    return out;
}

// ---------------------------------------------------------------------------
// potential recovery

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

}  // namespace detail

// The scalar potential f with df = phi, normalized by f(base_point) = 0 for
// the quadrature path; charts with a closed-form potential use it directly.
// The line integral runs along the straight segment from the base point
// (composite Gauss-Legendre, 8 panels x 8 nodes), after a closedness check.
inline double recover_potential(const MetricChart& chart, const Point& p, double closed_tol = 1e-6) {
    if (chart.lee_potential) return chart.lee_potential->operator()<double>(p);

    const auto phij = lee_form_at<J1>(chart, seed_point(p));
    const SqMat<double> dphi = detail::d_covector(phij);
    if (max_abs(dphi) > closed_tol)
        throw ChartError("recover_potential: Lee form of chart '" + chart.name +
                         "' is not closed at the requested point");

    const Point& base = chart.base_point;
    const int d = chart.dim();
    std::vector<double> dir(d);
    for (int i = 0; i < d; ++i) dir[i] = p[i] - base[i];
    double f = 0.0;
    const int panels = 8;
    for (int pa = 0; pa < panels; ++pa) {
        const double s0 = static_cast<double>(pa) / panels, s1 = static_cast<double>(pa + 1) / panels;
        const double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        for (int q = 0; q < 8; ++q) {
            const double s = mid + half * detail::kGlNode[q];
            Point x(d);
            for (int i = 0; i < d; ++i) x[i] = base[i] + s * dir[i];
            const auto phi = lee_form(chart, x);
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += phi[i] * dir[i];
            f += half * detail::kGlWeight[q] * dot;
        }
    }
    return f;
}

// e^f as a first-order jet at p: value e^{f(p)}, gradient e^{f(p)} phi(p).
inline J1 exp_potential_jet(const MetricChart& chart, const Point& p, double f_value) {
    const auto phi = lee_form(chart, p);
    J1 ef;
    ef.v = std::exp(f_value);
    ef.d.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) ef.d[i] = ef.v * phi[i];
    return ef;
}

// ---------------------------------------------------------------------------
// closed Lee form suite

struct ClosedLeeResult {
    std::vector<CheckResult> checks;
    double ef_constant = 0.0;
    bool degenerate = false;
};

// The pointwise identities of the closed-Lee regime. Emits one result per
// identity; the e^f-weighted constant is returned for cross-point
// aggregation by the caller.
inline ClosedLeeResult check_closed_lee_suite(const MetricChart& chart, const Point& p,
                                              double tol = 1e-7) {
    const int d = chart.dim();
    ClosedLeeResult out;

    const auto conn = christoffel_at<double>(chart, p);
    const auto xj = seed_point(p);
    const auto phij = lee_form_at<J1>(chart, xj);
    const auto phi = detail::jet_values(phij);
    const SqMat<double> dphi = detail::d_covector(phij);
    if (max_abs(dphi) > 1e-6)
        throw ChartError("check_closed_lee_suite: Lee form is not closed on chart '" + chart.name +
                         "'");
    const double nu = reduced_scalar(chart, p);
    const auto st = chart.structure<double>(p);
    const auto stj = chart.structure<J1>(xj);

    std::vector<double> phi2_grad(d, 0.0);
    double phi2 = 0.0;
    {
        // |phi|^2 as a field: phi^T g^{-1} phi, differentiated once
        const auto connj = christoffel_at<J1>(chart, xj);
        J1 s(0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s = s + connj.ginv(i, j) * phij[i] * phij[j];
        phi2 = s.v;
        for (int i = 0; i < d; ++i) phi2_grad[i] = jet_partial(s, i);
    }

    const std::array<std::vector<double>, 3> aphi = {
        detail::structure_on_covector(st[0], phi), detail::structure_on_covector(st[1], phi),
        detail::structure_on_covector(st[2], phi)};
    std::array<SqMat<double>, 3> om;
    for (int a = 0; a < 3; ++a) om[a] = kahler_form_at<double>(chart, p, static_cast<Axis>(a));

    // structure-rotated Lee derivative: for each axis A (cyclic A1, A2)
    //   nabla (A phi) = 1/2 (-phi (x) Aphi - Aphi (x) phi - A1phi ^ A2phi - nu Omega_A)
    {
        double res = 0.0, scale = 0.0;
        for (int a = 0; a < 3; ++a) {
            const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
            std::vector<J1> field(d);
            {
                // (A phi)_j as a field at first order
                const auto ap = detail::structure_on_covector(stj[a], phij);
                field = ap;
            }
            const SqMat<double> lhs = detail::nabla_covector(field, conn);
            SqMat<double> rhs = -1.0 * detail::outer11(phi, aphi[a]) -
                                detail::outer11(aphi[a], phi) -
                                detail::wedge11(aphi[a1], aphi[a2]) - nu * om[a];
            rhs *= 0.5;
            res = std::max(res, max_abs(lhs - rhs));
            scale = std::max({scale, max_abs(lhs), max_abs(rhs)});
        }
        out.checks.push_back(make_check("structure_lee_derivative", p, rel_residual(res, scale), tol));
    }

    // d(|phi|^2 + nu) = -(|phi|^2 + nu) phi
    {
        double res = 0.0, scale = 0.0;
        for (int i = 0; i < d; ++i) {
            const double lhs = phi2_grad[i];
            const double rhs = -(phi2 + nu) * phi[i];
            res = std::max(res, std::abs(lhs - rhs));
            scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
        out.checks.push_back(make_check("lee_energy_differential", p, rel_residual(res, scale), tol));
    }

    // (|phi|^2 + nu) e^f: constant along the chart; value reported upward
    const double f0 = recover_potential(chart, p);
    out.ef_constant = (phi2 + nu) * std::exp(f0);
    out.degenerate = max_abs(phi) < 1e-12 && !chart.lee_potential;

    // psi = d e^f: nabla psi = 1/2 e^f ((1 + L) phi (x) phi - nu g)
    const J1 efj = exp_potential_jet(chart, p, f0);
    {
        std::vector<J1> psij(d);
        for (int j = 0; j < d; ++j) psij[j] = efj * phij[j];
        const SqMat<double> lhs = detail::nabla_covector(psij, conn);
        const SqMat<double> pp = detail::outer11(phi, phi);
        SqMat<double> rhs = pp + l_apply(pp, st) - nu * conn.g;
        rhs *= 0.5 * efj.v;
        const double res = max_abs(lhs - rhs);
        out.checks.push_back(
            make_check("psi_hessian", p, rel_residual(res, max_abs(lhs), max_abs(rhs)), tol));
    }

    // nabla (A psi) = 1/2 e^f (phi ^ Aphi - A1phi ^ A2phi - nu Omega_A)
    {
        double res = 0.0, scale = 0.0;
        for (int a = 0; a < 3; ++a) {
            const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
            std::vector<J1> field(d);
            {
                const auto ap = detail::structure_on_covector(stj[a], phij);
                for (int j = 0; j < d; ++j) field[j] = efj * ap[j];
            }
            const SqMat<double> lhs = detail::nabla_covector(field, conn);
            SqMat<double> rhs = detail::wedge11(phi, aphi[a]) - detail::wedge11(aphi[a1], aphi[a2]) -
                                nu * om[a];
            rhs *= 0.5 * efj.v;
            res = std::max(res, max_abs(lhs - rhs));
            scale = std::max({scale, max_abs(lhs), max_abs(rhs)});
        }
        out.checks.push_back(make_check("structure_psi_derivative", p, rel_residual(res, scale), tol));
    }

    // nabla_xi xi = -1/2 (|phi|^2 + nu) xi
    {
        std::vector<J1> xij(d);
        {
            const auto connj = christoffel_at<J1>(chart, xj);
            xij = matvec(connj.ginv, phij);
        }
        std::vector<double> acc(d, 0.0);
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                s += xij[i].v * jet_partial(xij[k], i);
                for (int l = 0; l < d; ++l) s += xij[i].v * conn.gamma(k, i, l) * xij[l].v;
            }
            acc[k] = s;
        }
        double res = 0.0, scale = 0.0;
        for (int k = 0; k < d; ++k) {
            const double rhs = -0.5 * (phi2 + nu) * xij[k].v;
            res = std::max(res, std::abs(acc[k] - rhs));
            scale = std::max({scale, std::abs(acc[k]), std::abs(rhs)});
        }
        out.checks.push_back(make_check("xi_acceleration", p, rel_residual(res, scale), tol));
    }

    return out;
}

// ---------------------------------------------------------------------------
// commutators of the automorphism fields

// eta = e^f xi and its structure rotations: [eta, A eta] = 0 and
// [I eta, J eta] = C K eta with cyclic permutations, C the e^f-weighted
// constant of the chart.
inline std::vector<CheckResult> check_commutators(const MetricChart& chart, const Point& p,
                                                  double tol = 1e-7) {
    const int d = chart.dim();
    const auto xj = seed_point(p);
    const auto connj = christoffel_at<J1>(chart, xj);
    const auto phij = lee_form_at<J1>(chart, xj);
    const auto phi = detail::jet_values(phij);
    const auto stj = chart.structure<J1>(xj);

    const double f0 = recover_potential(chart, p);
    const J1 efj = exp_potential_jet(chart, p, f0);

    // eta and A eta as first-order vector fields
    std::vector<J1> eta(d);
    {
        const auto xi = matvec(connj.ginv, phij);
        for (int k = 0; k < d; ++k) eta[k] = efj * xi[k];
    }
    std::array<std::vector<J1>, 3> seta;
    for (int a = 0; a < 3; ++a) seta[a] = matvec(stj[a], eta);

    const auto bracket = [&](const std::vector<J1>& u, const std::vector<J1>& v) {
        std::vector<double> r(d, 0.0);
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                s += u[i].v * jet_partial(v[k], i) - v[i].v * jet_partial(u[k], i);
            r[k] = s;
        }
        return r;
    };

    // C from the e^f-weighted constant at this point
    double phi2 = 0.0;
    {
        const auto conn0 = christoffel_at<double>(chart, p);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) phi2 += conn0.ginv(i, j) * phi[i] * phi[j];
    }
    const double nu = reduced_scalar(chart, p);
    const double cconst = (phi2 + nu) * efj.v;

    const double eta_scale = [&] {
        double m = 0.0;
        for (int k = 0; k < d; ++k) m = std::max(m, std::abs(eta[k].v));
        return m;
    }();

    double res_zero = 0.0;
    for (int a = 0; a < 3; ++a) res_zero = std::max(res_zero, max_abs(bracket(eta, seta[a])));

    double res_pair = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
        const auto br = bracket(seta[a], seta[a1]);
        double m = 0.0;
        for (int k = 0; k < d; ++k) m = std::max(m, std::abs(br[k] - cconst * seta[a2][k].v));
        res_pair = std::max(res_pair, m);
    }

    std::vector<CheckResult> out;
    const double scale = std::max(eta_scale * eta_scale, eta_scale);
    out.push_back(make_check("brackets_eta_structure", p, rel_residual(res_zero, scale), tol));
    out.push_back(make_check("brackets_structure_pairs", p, rel_residual(res_pair, scale), tol));
    return out;
}

// ---------------------------------------------------------------------------
// hyper-Kahler potential checks

// On a hyper-Kahler chart (vanishing structure connection):
//   nabla d mu = g,  1/2 d(A d mu) = Omega_A,  d(g(d mu, d mu)) = 2 d mu.
inline std::vector<CheckResult> check_hk_potential(const MetricChart& chart, const ScalarField& mu,
                                                   const Point& p, double tol = 1e-7) {
    const int d = chart.dim();
    {
        const auto forms = connection_abc(chart, p);
        const double anorm = std::max({max_abs(forms.a), max_abs(forms.b), max_abs(forms.c)});
        if (anorm > 1e-6)
            throw ChartError("check_hk_potential: chart '" + chart.name + "' is not hyper-Kahler");
    }
    const auto conn = christoffel_at<double>(chart, p);
    const auto xj = seed_point(p);

    // mu to second order
    const J2 mujj = mu(seed_point(xj));
    std::vector<double> dmu(d);
    SqMat<double> hess(d);
    for (int i = 0; i < d; ++i) {
        const J1 di = jet_partial(mujj, i);
        dmu[i] = di.v;
        for (int j = 0; j < d; ++j) hess(i, j) = jet_partial(di, j);
    }

    std::vector<CheckResult> out;

    // nabla d mu = g
    {
        SqMat<double> nd(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = hess(i, j);
                for (int k = 0; k < d; ++k) s -= conn.gamma(k, i, j) * dmu[k];
                nd(i, j) = s;
            }
        const double res = max_abs(nd - conn.g);
        out.push_back(
            make_check("potential_hessian", p, rel_residual(res, max_abs(nd), max_abs(conn.g)), tol));
    }

    // 1/2 d (A d mu) = Omega_A for each structure
    {
        const auto stj = chart.structure<J1>(xj);
        double res = 0.0, scale = 0.0;
        for (int a = 0; a < 3; ++a) {
            std::vector<J1> dmuj(d);
            for (int i = 0; i < d; ++i) dmuj[i] = jet_partial(mujj, i);
            const auto lam = detail::structure_on_covector(stj[a], dmuj);
            const SqMat<double> dl = 0.5 * detail::d_covector(lam);
            const SqMat<double> om = kahler_form_at<double>(chart, p, static_cast<Axis>(a));
            res = std::max(res, max_abs(dl - om));
            scale = std::max({scale, max_abs(dl), max_abs(om)});
        }
        out.push_back(make_check("potential_structure_ddbar", p, rel_residual(res, scale), tol));
    }

    // d(g(d mu, d mu)) = 2 d mu
    {
        const auto connj = christoffel_at<J1>(chart, xj);
        J1 en(0.0);
        std::vector<J1> dmuj(d);
        for (int i = 0; i < d; ++i) dmuj[i] = jet_partial(mujj, i);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) en = en + connj.ginv(i, j) * dmuj[i] * dmuj[j];
        double res = 0.0, scale = 0.0;
        for (int i = 0; i < d; ++i) {
            const double eni = jet_partial(en, i);
            res = std::max(res, std::abs(eni - 2.0 * dmu[i]));
            scale = std::max({scale, std::abs(eni), 2.0 * std::abs(dmu[i])});
        }
        out.push_back(make_check("potential_energy_differential", p, rel_residual(res, scale), tol));
    }

    return out;
}

// ---------------------------------------------------------------------------
// finite-difference oracle

// 4th-order central stencils on the plain metric evaluator, checked against
// the jet derivatives. First derivatives directly, second derivatives by
// nesting the first-derivative stencil.
inline std::vector<CheckResult> fd_metric_check(const MetricChart& chart, const Point& p,
                                                double h = 1e-3, double tol = 1e-6) {
    const int d = chart.dim();
    const auto eval = [&](const Point& x) { return chart.metric<double>(x); };

    const auto d1 = [&](const Point& x, int k) {
        Point xp = x, xpp = x, xm = x, xmm = x;
        xp[k] += h;
        xpp[k] += 2 * h;
        xm[k] -= h;
        xmm[k] -= 2 * h;
        SqMat<double> r(d);
        const auto mp = eval(xp), mpp = eval(xpp), mm = eval(xm), mmm = eval(xmm);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                r(i, j) = (-mpp(i, j) + 8 * mp(i, j) - 8 * mm(i, j) + mmm(i, j)) / (12 * h);
        return r;
    };

    const auto gjj = chart.metric<J2>(seed_point(seed_point(p)));

    double res1 = 0.0, scale1 = 0.0, res2 = 0.0, scale2 = 0.0;
    for (int k = 0; k < d; ++k) {
        const SqMat<double> fd = d1(p, k);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double jd = jet_partial(gjj(i, j), k).v;
                res1 = std::max(res1, std::abs(fd(i, j) - jd));
                scale1 = std::max(scale1, std::abs(jd));
            }
    }
    for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) {
            // nested first-derivative stencil for d_k d_l g
            SqMat<double> fd(d);
            const double c[4] = {-1.0, 8.0, -8.0, 1.0};
            const double off[4] = {2 * h, h, -h, -2 * h};
            for (int q = 0; q < 4; ++q) {
                Point x = p;
                x[l] += off[q];
                const SqMat<double> dk = d1(x, k);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) fd(i, j) += c[q] * dk(i, j) / (12 * h);
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const double jd = jet_partial(jet_partial(gjj(i, j), k), l);
                    res2 = std::max(res2, std::abs(fd(i, j) - jd));
                    scale2 = std::max(scale2, std::abs(jd));
                }
        }

    std::vector<CheckResult> out;
    out.push_back(make_check("metric_gradient_vs_fd", p, rel_residual(res1, scale1), tol));
    out.push_back(make_check("metric_hessian_vs_fd", p, rel_residual(res2, scale2), 10 * tol));
    return out;
}

}  // namespace qkgeo
