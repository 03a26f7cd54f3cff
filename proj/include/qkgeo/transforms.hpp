#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "qkgeo/checks.hpp"

namespace qkgeo {

namespace detail {

template <class T>
SqMat<T> outer_cov(const std::vector<T>& a, const std::vector<T>& b) {
    const int d = static_cast<int>(a.size());
    SqMat<T> m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[i] * b[j];
    return m;
}

template <class T>
T lee_norm2_from(const SqMat<T>& ginv, const std::vector<T>& phi) {
    const int d = static_cast<int>(phi.size());
    T s(0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s = s + ginv(i, j) * phi[i] * phi[j];
    return s;
}

// g0 = 1/nu^2 (|phi|^2 + nu) ((1 + L) phi (x) phi + nu g)
template <class T>
SqMat<T> hk_metric_from_lee(const MetricChart& src, double nu, const std::vector<T>& x) {
    const auto g = src.metric(x);
    const auto phi = lee_form_at<T>(src, x);
    const auto st = src.structure(x);
    const T phi2 = lee_norm2_from(inverse(g), phi);
    const SqMat<T> pp = outer_cov(phi, phi);
    SqMat<T> m = pp + l_apply(pp, st);
    m += nu * g;
    m *= (phi2 + nu) / (nu * nu);
    return m;
}

// mu = 2/nu^2 (|phi|^2 + nu)
template <class T>
T hk_potential_from_lee(const MetricChart& src, double nu, const std::vector<T>& x) {
    const auto g = src.metric(x);
    const auto phi = lee_form_at<T>(src, x);
    const T phi2 = lee_norm2_from(inverse(g), phi);
    return (2.0 / (nu * nu)) * (phi2 + nu);
}

// g_p = -p / (p g0(dmu,dmu) + 1)^2 (1 + L) dmu (x) dmu + g0 / (p g0(dmu,dmu) + 1)
template <class T>
SqMat<T> swann_family_metric(const MetricChart& g0chart, const ScalarField& mu, double p,
                             const std::vector<T>& x) {
    const int d = g0chart.dim();
    const auto g0 = g0chart.metric(x);
    const auto st = g0chart.structure(x);
    const auto muj = mu(seed_point(x));
    std::vector<T> dmu(d);
    for (int i = 0; i < d; ++i) dmu[i] = jet_partial(muj, i);
    const T e = lee_norm2_from(inverse(g0), dmu);
    const T q = p * e + 1.0;
    const SqMat<T> pp = outer_cov(dmu, dmu);
    SqMat<T> m = pp + l_apply(pp, st);
    m *= (-p) / (q * q);
    SqMat<T> g0scaled = g0;
    g0scaled *= 1.0 / q;
    m += g0scaled;
    return m;
}

// p g0(dmu,dmu) + 1 at one jet level
template <class T>
T swann_q_factor(const MetricChart& g0chart, const ScalarField& mu, double p,
                 const std::vector<T>& x) {
    const int d = g0chart.dim();
    const auto g0 = g0chart.metric(x);
    const auto muj = mu(seed_point(x));
    std::vector<T> dmu(d);
    for (int i = 0; i < d; ++i) dmu[i] = jet_partial(muj, i);
    return p * lee_norm2_from(inverse(g0), dmu) + 1.0;
}

inline int max_metric_level(const MetricChart& c) {
    if (c.metric3) return 3;
    if (c.metric2) return 2;
    if (c.metric1) return 1;
    return 0;
}

inline int max_scalar_level(const ScalarField& f) {
    if (f.f3) return 3;
    if (f.f2) return 2;
    if (f.f1) return 1;
    return 0;
}

}  // namespace detail

struct HyperKahlerTransform {
    MetricChart chart;     // the derived (pseudo-)hyper-Kahler metric
    ScalarField potential; // its hyper-Kahler potential
    double source_nu = 0.0;
};

// From a chart with closed Lee form and |phi|^2 + nu bounded away from zero,
// derive the hyper-Kahler metric carried by the same hypercomplex structure,
// together with its potential. Each output level consumes one source level
// above it, so the output supports derivative orders 0..(source max - 1).
inline HyperKahlerTransform hyperkahler_transform(const MetricChart& src, double margin = 1e-3) {
    const double nu =
        src.nominal_nu ? *src.nominal_nu : reduced_scalar(src, src.base_point);
    if (std::abs(nu) < 1e-12)
        throw ChartError("hyperkahler_transform: chart '" + src.name +
                         "' has vanishing scalar curvature");

    {
        const auto phi = lee_form(src, src.base_point);
        const auto conn = christoffel_at<double>(src, src.base_point);
        const double phi2 = detail::lee_norm2_from(conn.ginv, phi);
        if (std::abs(phi2 + nu) < margin)
            throw ChartError("hyperkahler_transform: |phi|^2 + nu vanishes on chart '" + src.name +
                             "', the construction degenerates");
    }

    const auto srcp = std::make_shared<MetricChart>(src);
    HyperKahlerTransform out;
    out.source_nu = nu;
    MetricChart& c = out.chart;
    c.name = src.name + ":hk";
    c.n = src.n;
    c.base_point = src.base_point;
    c.nominal_nu = 0.0;
    const int dim = src.dim();
    c.lee_closed_form = [dim](const Point&) { return std::vector<double>(dim, 0.0); };
    c.lee_potential = make_scalar_field([](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        return T(0.0);
    });

    const int src_level = detail::max_metric_level(src);
    if (src_level >= 1)
        c.metric0 = [srcp, nu](const std::vector<double>& x) {
            return detail::hk_metric_from_lee<double>(*srcp, nu, x);
        };
    if (src_level >= 2)
        c.metric1 = [srcp, nu](const std::vector<J1>& x) {
            return detail::hk_metric_from_lee<J1>(*srcp, nu, x);
        };
    if (src_level >= 3)
        c.metric2 = [srcp, nu](const std::vector<J2>& x) {
            return detail::hk_metric_from_lee<J2>(*srcp, nu, x);
        };
    c.structure0 = src.structure0;
    c.structure1 = src.structure1;
    c.structure2 = src.structure2;
    c.structure3 = src.structure3;

    const auto src_domain = src.domain;
    c.domain = [srcp, src_domain, nu, margin](const Point& p) {
        if (src_domain && !src_domain(p)) return false;
        const auto phi = lee_form(*srcp, p);
        const auto conn = christoffel_at<double>(*srcp, p);
        return std::abs(detail::lee_norm2_from(conn.ginv, phi) + nu) >= margin;
    };

    if (src_level >= 1)
        out.potential.f0 = [srcp, nu](const std::vector<double>& x) {
            return detail::hk_potential_from_lee<double>(*srcp, nu, x);
        };
    if (src_level >= 2)
        out.potential.f1 = [srcp, nu](const std::vector<J1>& x) {
            return detail::hk_potential_from_lee<J1>(*srcp, nu, x);
        };
    if (src_level >= 3)
        out.potential.f2 = [srcp, nu](const std::vector<J2>& x) {
            return detail::hk_potential_from_lee<J2>(*srcp, nu, x);
        };
    return out;
}

// From a (pseudo-)hyper-Kahler chart with potential mu, the one-parameter
// family of quaternionic metrics carried by the same structure. The output
// has Lee form -d ln |p g0(dmu,dmu) + 1| and reduced scalar curvature 4p.
inline MetricChart family_transform(const MetricChart& g0chart, const ScalarField& mu, double p,
                                    double domain_margin = 1e-3) {
    if (p == 0.0) throw ChartError("family_transform: parameter p must be nonzero");

    MetricChart c;
    c.name = g0chart.name + ":gp";
    c.n = g0chart.n;
    c.base_point = g0chart.base_point;
    c.nominal_nu = 4.0 * p;

    // shared copies for the lambdas
    const auto g0copy = std::make_shared<MetricChart>(g0chart);
    const auto mucopy = std::make_shared<ScalarField>(mu);

    const int glevel = detail::max_metric_level(g0chart);
    const int mlevel = detail::max_scalar_level(mu);
    const int out_level = std::min(glevel, mlevel - 1);
    if (out_level < 0)
        throw ChartError("family_transform: potential does not support differentiation");

    if (out_level >= 0)
        c.metric0 = [g0copy, mucopy, p](const std::vector<double>& x) {
            return detail::swann_family_metric<double>(*g0copy, *mucopy, p, x);
        };
    if (out_level >= 1)
        c.metric1 = [g0copy, mucopy, p](const std::vector<J1>& x) {
            return detail::swann_family_metric<J1>(*g0copy, *mucopy, p, x);
        };
    if (out_level >= 2)
        c.metric2 = [g0copy, mucopy, p](const std::vector<J2>& x) {
            return detail::swann_family_metric<J2>(*g0copy, *mucopy, p, x);
        };
    c.structure0 = g0chart.structure0;
    c.structure1 = g0chart.structure1;
    c.structure2 = g0chart.structure2;
    c.structure3 = g0chart.structure3;

    const auto g0domain = g0chart.domain;
    c.domain = [g0copy, mucopy, p, g0domain, domain_margin](const Point& x) {
        if (g0domain && !g0domain(x)) return false;
        const double q = detail::swann_q_factor<double>(*g0copy, *mucopy, p, x);
        return std::abs(q) >= domain_margin;
    };

    // phi_p = -d ln |q|
    c.lee_closed_form = [g0copy, mucopy, p](const Point& x) {
        const J1 q = detail::swann_q_factor<J1>(*g0copy, *mucopy, p, seed_point(x));
        std::vector<double> phi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) phi[i] = -jet_partial(q, i) / q.v;
        return phi;
    };
    ScalarField fp;
    if (mlevel >= 1)
        fp.f0 = [g0copy, mucopy, p](const std::vector<double>& x) {
            const double q = detail::swann_q_factor<double>(*g0copy, *mucopy, p, x);
            return -std::log(std::abs(q));
        };
    if (mlevel >= 2)
        fp.f1 = [g0copy, mucopy, p](const std::vector<J1>& x) {
            J1 q = detail::swann_q_factor<J1>(*g0copy, *mucopy, p, x);
            if (q.v < 0.0) q = -q;
            return -log(q);
        };
    if (mlevel >= 3)
        fp.f2 = [g0copy, mucopy, p](const std::vector<J2>& x) {
            J2 q = detail::swann_q_factor<J2>(*g0copy, *mucopy, p, x);
            if (value_of(q) < 0.0) q = -q;
            return -log(q);
        };
    c.lee_potential = fp;
    return c;
}

// Entrywise comparison g vs g_{nu/4} rebuilt through both transforms.
inline CheckResult check_transform_roundtrip(const MetricChart& src,
                                             const MetricChart& roundtripped, const Point& p,
                                             double tol = 1e-9) {
    const auto a = src.metric<double>(p);
    const auto b = roundtripped.metric<double>(p);
    const double res = max_abs(a - b) / std::max(max_abs(a), 1e-300);
    return make_check("thm2_roundtrip_metric", p, res, tol);
}

}  // namespace qkgeo
