#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkgeo/rng.hpp"
#include "qkgeo/transforms.hpp"

namespace qkgeo {

// Facts a chart constructor promises about its metric; every populated field
// is pinned by at least one test.
struct ZooExpected {
    std::optional<double> nu;
    bool closed_lee = false;
    std::optional<double> lee_norm2_plus_nu;  // when constant over the chart
    std::optional<double> ef_constant;        // (|phi|^2 + nu) e^f
    bool rprime_zero = false;
    bool hk_image_flat = false;  // image under the hyper-Kahler transform is flat
    bool hyperkahler = false;
};

struct ZooEntry {
    MetricChart chart;
    ZooExpected expected;
    std::function<Point(Rng&)> sampler;
};

namespace detail {

template <class T>
T radius2(const std::vector<T>& x) {
    T r(0.0);
    for (const T& c : x) r = r + c * c;
    return r;
}

// the two model metrics in one closed form, sigma = +1 / -1:
//   g = ( (1 + sigma r^2) delta - sigma (1 + L) x^flat (x) x^flat ) / (1 + sigma r^2)^2
template <class T>
SqMat<T> model_metric(int n, double sigma, const std::vector<T>& x) {
    const int d = 4 * n;
    const T den = 1.0 + sigma * radius2(x);
    SqMat<T> pp(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) pp(i, j) = x[i] * x[j];
    SqMat<T> m = pp + l_apply(pp);
    m *= -sigma;
    for (int i = 0; i < d; ++i) m(i, i) = m(i, i) + den;
    m *= 1.0 / (den * den);
    return m;
}

}  // namespace detail

// Standard flat metric on H^n; hyper-Kahler with potential |x|^2 / 2.
inline ZooEntry flat_hn(int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("flat_hn: n must be 1, 2 or 3");
    const int d = 4 * n;
    ZooEntry e;
    e.chart.name = "flat";
    e.chart.n = n;
    set_metric_all_levels(e.chart, [d](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        (void)x;
        return SqMat<T>::identity(d);
    });
    e.chart.base_point = Point(d, 0.0);
    e.chart.nominal_nu = 0.0;
    e.chart.lee_closed_form = [d](const Point&) { return std::vector<double>(d, 0.0); };
    e.chart.lee_potential = make_scalar_field([](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        (void)x;
        return T(0.0);
    });
    e.expected.nu = 0.0;
    e.expected.closed_lee = true;
    e.expected.lee_norm2_plus_nu = 0.0;
    e.expected.ef_constant = 0.0;
    e.expected.rprime_zero = true;
    e.expected.hyperkahler = true;
    e.sampler = [d](Rng& rng) { return rng.ball_point(d, 2.0); };
    return e;
}

// the hyper-Kahler potential of the flat chart, mu = |x|^2 / 2
inline ScalarField flat_hk_potential() {
    return make_scalar_field([](const auto& x) { return 0.5 * detail::radius2(x); });
}

namespace detail {

inline ZooEntry model_entry(int n, double sigma) {
    if (n < 1 || n > 3) throw std::invalid_argument("model chart: n must be 1, 2 or 3");
    const int d = 4 * n;
    ZooEntry e;
    e.chart.name = sigma > 0 ? "hp" : "hh";
    e.chart.n = n;
    set_metric_all_levels(e.chart,
                          [n, sigma](const auto& x) { return model_metric(n, sigma, x); });
    e.chart.base_point = Point(d, 0.0);
    e.chart.nominal_nu = 4.0 * sigma;
    e.chart.lee_closed_form = [sigma](const Point& x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double den = 1.0 + sigma * r2;
        std::vector<double> phi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) phi[i] = -sigma * 2.0 * x[i] / den;
        return phi;
    };
    e.chart.lee_potential = make_scalar_field([sigma](const auto& x) {
        return -log(1.0 + sigma * radius2(x));
    });
    if (sigma < 0) {
        e.chart.domain = [](const Point& x) {
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            return r2 < 0.9 * 0.9;
        };
        e.sampler = [d](Rng& rng) { return rng.ball_point(d, 0.8); };
    } else {
        e.sampler = [d](Rng& rng) { return rng.ball_point(d, 2.0); };
    }
    e.expected.nu = 4.0 * sigma;
    e.expected.closed_lee = true;
    e.expected.ef_constant = 4.0 * sigma;
    e.expected.rprime_zero = true;
    e.expected.hk_image_flat = true;
    return e;
}

}  // namespace detail

// Non-homogeneous coordinate chart of the quaternionic projective space,
// nu = +4.
inline ZooEntry projective_chart(int n) { return detail::model_entry(n, +1.0); }

// The quaternionic hyperbolic ball, nu = -4.
inline ZooEntry hyperbolic_chart(int n) { return detail::model_entry(n, -1.0); }

namespace detail {

// ---------------------------------------------------------------------------
// bundle chart over a flat hyper-Kahler base: coordinates
// (t, u, v, w, x^1 .. x^{4(n-1)}), t > 0, with nu a fixed negative constant.
//
// The structure triple is not the constant standard one: on the coframe,
//   I dt = -du + nu a_I,  J dt = -dv + nu a_J,  K dt = -dw + nu a_K,
// with a_A = 1/2 iota_x Omega_A' the radial primitives of the base Kahler
// forms, and the base coframe transforms by the base structure. The matrices
// below realize that action on vectors; they are affine in the base
// coordinates and t-independent.

// (A' beta)_s = -sign_A(s) beta_{perm_A(s)} on base covectors
template <class T>
std::vector<T> base_structure_on_covector(Axis a, const std::vector<T>& beta) {
    const int db = static_cast<int>(beta.size());
    std::vector<T> r(db, T(0.0));
    for (int s = 0; s < db; ++s) r[s] = -structure_sign(a, s) * beta[structure_perm(a, s)];
    return r;
}

template <class T>
std::array<std::vector<T>, 3> thm6_alpha(int dbase, const std::vector<T>& x) {
    // alpha_A = 1/2 iota_{x_base} Omega_A': alpha_A[s] = 1/2 (A' x_base)_s
    std::array<std::vector<T>, 3> alpha;
    for (int a = 0; a < 3; ++a) {
        alpha[a].assign(dbase, T(0.0));
        for (int r = 0; r < dbase; ++r) {
            const Axis ax = static_cast<Axis>(a);
            alpha[a][structure_perm(ax, r)] =
                alpha[a][structure_perm(ax, r)] + 0.5 * structure_sign(ax, r) * x[4 + r];
        }
    }
    return alpha;
}

template <class T>
std::array<SqMat<T>, 3> thm6_structure(int n, double nu, const std::vector<T>& x) {
    const int d = 4 * n, db = d - 4;
    const auto alpha = thm6_alpha(db, x);

    // rows of the coframe action: fiber 4x4 block and base-covector tail
    //   C[r][c] with I dt = -du + nu alpha_I etc.; vectors transform by -C.
    std::array<SqMat<T>, 3> out;
    for (auto& m : out) m = SqMat<T>(d);

    const double fiber[3][4][4] = {
        // I: dt -> -du, du -> dt, dv -> dw, dw -> -dv
        {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}},
        // J: dt -> -dv, du -> -dw, dv -> dt, dw -> du
        {{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}},
        // K: dt -> -dw, du -> dv, dv -> -du, dw -> dt
        {{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}},
    };

    for (int a = 0; a < 3; ++a) {
        const Axis ax = static_cast<Axis>(a);
        SqMat<T> c(d);
        for (int r = 0; r < 4; ++r)
            for (int cc = 0; cc < 4; ++cc) c(r, cc) = T(fiber[a][r][cc]);

        // base tails of the four fiber rows
        const auto rot = [&](Axis outer_ax, const std::vector<T>& form) {
            return base_structure_on_covector(outer_ax, form);
        };
        std::array<std::vector<T>, 4> tail;
        if (a == 0) {  // I
            tail[0] = alpha[0];
            tail[1] = rot(Axis::I, alpha[0]);
            tail[2] = rot(Axis::I, alpha[1]);
            for (int s = 0; s < db; ++s) tail[2][s] = tail[2][s] - alpha[2][s];
            tail[3] = rot(Axis::I, alpha[2]);
            for (int s = 0; s < db; ++s) tail[3][s] = tail[3][s] + alpha[1][s];
        } else if (a == 1) {  // J
            tail[0] = alpha[1];
            tail[1] = rot(Axis::J, alpha[0]);
            for (int s = 0; s < db; ++s) tail[1][s] = tail[1][s] + alpha[2][s];
            tail[2] = rot(Axis::J, alpha[1]);
            tail[3] = rot(Axis::J, alpha[2]);
            for (int s = 0; s < db; ++s) tail[3][s] = tail[3][s] - alpha[0][s];
        } else {  // K
            tail[0] = alpha[2];
            tail[1] = rot(Axis::K, alpha[0]);
            for (int s = 0; s < db; ++s) tail[1][s] = tail[1][s] - alpha[1][s];
            tail[2] = rot(Axis::K, alpha[1]);
            for (int s = 0; s < db; ++s) tail[2][s] = tail[2][s] + alpha[0][s];
            tail[3] = rot(Axis::K, alpha[2]);
        }
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < db; ++s) c(r, 4 + s) = nu * tail[r][s];

        // base coframe rows: (A' dx^s)_r = -sign_A(r) delta_{s, perm_A(r)}
        for (int r = 0; r < db; ++r)
            c(4 + structure_perm(ax, r), 4 + r) = T(-structure_sign(ax, r));

        // vector action is the negated coframe action
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out[a](i, j) = -1.0 * c(i, j);
    }
    return out;
}

template <class T>
SqMat<T> thm6_metric(int n, double nu, const std::vector<T>& x) {
    const int d = 4 * n, db = d - 4;
    const auto alpha = thm6_alpha(db, x);
    const T t = x[0];
    const T coef = (-1.0 / nu) / (t * t);

    // coframe: dt, du - nu alpha_I, dv - nu alpha_J, dw - nu alpha_K
    std::array<std::vector<T>, 4> theta;
    for (auto& th : theta) th.assign(d, T(0.0));
    theta[0][0] = T(1.0);
    for (int a = 0; a < 3; ++a) {
        theta[a + 1][1 + a] = T(1.0);
        for (int s = 0; s < db; ++s) theta[a + 1][4 + s] = -nu * alpha[a][s];
    }

    SqMat<T> g(d);
    for (const auto& th : theta)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = g(i, j) + coef * th[i] * th[j];
    const T base_coef = 1.0 / t;
    for (int s = 0; s < db; ++s) g(4 + s, 4 + s) = g(4 + s, 4 + s) + base_coef;
    return g;
}

}  // namespace detail

// Bundle metric over the flat hyper-Kahler base, with reduced scalar
// curvature the given negative constant, Lee form -d ln t and
// |phi|^2 + nu = 0 throughout.
inline ZooEntry bundle_chart(int n, double nu) {
    if (n < 2 || n > 3) throw std::invalid_argument("bundle_chart: n must be 2 or 3");
    if (nu >= 0.0) throw std::invalid_argument("bundle_chart: nu must be negative");
    const int d = 4 * n;
    ZooEntry e;
    e.chart.name = "thm6";
    e.chart.n = n;
    set_metric_all_levels(e.chart,
                          [n, nu](const auto& x) { return detail::thm6_metric(n, nu, x); });
    set_structure_all_levels(e.chart,
                             [n, nu](const auto& x) { return detail::thm6_structure(n, nu, x); });
    e.chart.base_point = Point(d, 0.0);
    e.chart.base_point[0] = 1.0;
    e.chart.nominal_nu = nu;
    e.chart.domain = [](const Point& x) { return x[0] > 0.1; };
    e.chart.lee_closed_form = [d](const Point& x) {
        std::vector<double> phi(d, 0.0);
        phi[0] = -1.0 / x[0];
        return phi;
    };
    e.chart.lee_potential = make_scalar_field([](const auto& x) { return -log(x[0]); });
    e.expected.nu = nu;
    e.expected.closed_lee = true;
    e.expected.lee_norm2_plus_nu = 0.0;
    e.expected.ef_constant = 0.0;
    // over the flat base the bundle metric is locally the hyperbolic model
    e.expected.rprime_zero = true;
    e.sampler = [d](Rng& rng) {
        Point p(d);
        p[0] = rng.uniform(0.5, 2.0);
        for (int i = 1; i < 4; ++i) p[i] = rng.uniform(-1.0, 1.0);
        const Point base = rng.ball_point(d - 4, 1.0);
        for (int s = 0; s < d - 4; ++s) p[4 + s] = base[s];
        return p;
    };
    return e;
}

// The one-parameter family over the flat chart, defined by the transform;
// p = +1 and p = -1 coincide with the model charts entrywise. The metric,
// Lee form and potential evaluators are replaced by the closed forms the
// transform produces on this source -- with q = 1 + p |x|^2,
//   g_p = -p/q^2 (1 + L) x^flat (x) x^flat + delta / q,
//   phi_p = -d ln q,  f_p = -ln q --
// so that every derivative level stays available; a test pins the closed
// forms to the transform route.
inline ZooEntry gp_chart(int n, double p) {
    if (n < 1 || n > 3) throw std::invalid_argument("gp_chart: n must be 1, 2 or 3");
    if (p == 0.0) throw std::invalid_argument("gp_chart: p must be nonzero");
    const int d = 4 * n;
    ZooEntry flat = flat_hn(n);
    ZooEntry e;
    e.chart = family_transform(flat.chart, flat_hk_potential(), p);
    e.chart.name = "gp";
    set_metric_all_levels(e.chart, [d, p](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        const T q = 1.0 + p * detail::radius2(x);
        SqMat<T> pp(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) pp(i, j) = x[i] * x[j];
        SqMat<T> m = pp + l_apply(pp);
        m *= (-p) / (q * q);
        for (int i = 0; i < d; ++i) m(i, i) = m(i, i) + 1.0 / q;
        return m;
    });
    e.chart.lee_closed_form = [p](const Point& x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double q = 1.0 + p * r2;
        std::vector<double> phi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) phi[i] = -2.0 * p * x[i] / q;
        return phi;
    };
    e.chart.lee_potential = make_scalar_field(
        [p](const auto& x) { return -log(1.0 + p * detail::radius2(x)); });
    e.expected.nu = 4.0 * p;
    e.expected.closed_lee = true;
    e.expected.ef_constant = 4.0 * p;
    e.expected.rprime_zero = true;
    e.expected.hk_image_flat = true;
    double radius = 2.0;
    if (p < 0.0) {
        const double singular = 1.0 / std::sqrt(-p);
        radius = std::min(2.0, singular - 0.1);
        if (radius <= 0.05)
            throw std::invalid_argument("gp_chart: no safe sampling region for this p");
    }
    e.sampler = [d, radius](Rng& rng) { return rng.ball_point(d, radius); };
    return e;
}

// ---------------------------------------------------------------------------
// registry

struct ZooParams {
    int n = 2;
    double p = 1.0;
    double nu = -1.0;
};

inline std::vector<std::string> zoo_names() { return {"flat", "hp", "hh", "thm6", "gp"}; }

inline ZooEntry make_zoo_entry(const std::string& name, const ZooParams& params) {
    if (name == "flat") return flat_hn(params.n);
    if (name == "hp") return projective_chart(params.n);
    if (name == "hh") return hyperbolic_chart(params.n);
    if (name == "thm6") return bundle_chart(params.n, params.nu);
    if (name == "gp") return gp_chart(params.n, params.p);
    throw std::invalid_argument("unknown chart '" + name + "'");
}

}  // namespace qkgeo
