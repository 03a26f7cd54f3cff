// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is fixed here, in code; the seeds are fixed so reruns are
// bit-reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qkgeo/qkgeo.hpp"

using namespace qkgeo;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// 1. scalar curvature of the model tensor is 16 n (n+2) for n = 1,2,3,
//    relative 1e-10, under one second
void criterion1() {
    Timer timer;
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const double want = 16.0 * n * (n + 2);
        worst = std::max(worst, std::abs(scalar_curvature_flat(model_curvature_tensor(n)) - want) / want);
    }
    const double secs = timer.seconds();
    report(1, worst <= 1e-10 && secs < 1.0,
           "model tensor calibration 48/128/240, max rel err " + fmt(worst) + ", " + fmt(secs) +
               " s (cap 1 s)");
}

// 2. reduced scalar of the two model charts (n = 2, 20 seeded points) is
//    +4 / -4 with deviation < 1e-7, under ten seconds
void criterion2() {
    Timer timer;
    double worst = 0.0;
    Rng rng(1001);
    for (const auto& [entry, want] :
         {std::pair{projective_chart(2), 4.0}, std::pair{hyperbolic_chart(2), -4.0}}) {
        for (int i = 0; i < 20; ++i)
            worst = std::max(worst,
                             std::abs(reduced_scalar(entry.chart, entry.sampler(rng)) - want));
    }
    const double secs = timer.seconds();
    report(2, worst < 1e-7 && secs < 10.0,
           "reduced scalar +-4 on the model charts, max dev " + fmt(worst) + ", " + fmt(secs) +
               " s (cap 10 s)");
}

// 3. Lee forms of the model charts match -d ln(1 +- |x|^2) componentwise to
//    1e-8 at 20 points
void criterion3() {
    double worst = 0.0;
    Rng rng(1002);
    for (const auto& entry : {projective_chart(2), hyperbolic_chart(2)}) {
        for (int i = 0; i < 20; ++i) {
            const Point p = entry.sampler(rng);
            const auto phi = lee_form(entry.chart, p);
            const auto closed = entry.chart.lee_closed_form(p);
            for (std::size_t k = 0; k < phi.size(); ++k)
                worst = std::max(worst, std::abs(phi[k] - closed[k]));
        }
    }
    report(3, worst < 1e-8, "Lee forms match the logarithmic closed forms, max dev " + fmt(worst));
}

// 4. Lee covariant-derivative identity and its trace residuals < 1e-7 on the
//    model charts and the bundle chart (n = 2)
void criterion4() {
    double worst = 0.0;
    Rng rng(1003);
    for (const auto& entry :
         {projective_chart(2), hyperbolic_chart(2), bundle_chart(2, -1.0)}) {
        for (int i = 0; i < 10; ++i) {
            const Point p = entry.sampler(rng);
            for (const auto& c : check_lee_derivative(entry.chart, p)) worst = std::max(worst, c.residual);
        }
    }
    report(4, worst < 1e-7,
           "Lee derivative identity and codifferential trace, max residual " + fmt(worst));
}

// 5. the hyper-Kahler curvature part vanishes on the model charts (1e-7
//    relative) and its Lee-vector slice vanishes on every closed-Lee chart
//    (1e-8 relative)
void criterion5() {
    double worst_zero = 0.0, worst_slice = 0.0;
    Rng rng(1004);
    for (const auto& entry : {projective_chart(2), hyperbolic_chart(2)}) {
        for (int i = 0; i < 10; ++i) {
            const auto data = curvature_split(entry.chart, entry.sampler(rng));
            worst_zero = std::max(worst_zero, data.remainder.max_abs() / data.riemann_scale);
        }
    }
    ZooParams params;
    params.n = 2;
    params.p = 1.5;
    params.nu = -1.0;
    for (const auto& name : zoo_names()) {
        const ZooEntry entry = make_zoo_entry(name, params);
        if (!entry.expected.closed_lee) continue;
        for (int i = 0; i < 5; ++i) {
            const Point p = entry.sampler(rng);
            for (const auto& c : remainder_checks(entry.chart, p, false, true))
                if (c.identity == "rprime_xi_slice") worst_slice = std::max(worst_slice, c.residual);
        }
    }
    report(5, worst_zero < 1e-7 && worst_slice < 1e-8,
           "curvature remainder zero on model charts (" + fmt(worst_zero) +
               "), Lee-vector slice zero on closed-Lee charts (" + fmt(worst_slice) + ")");
}

// 6. round trip through the hyper-Kahler correspondence returns the metric
//    (1e-9 relative, 20 points) and the intermediate metric of the projective
//    chart is flat (1e-7) and satisfies the potential identities
void criterion6() {
    double worst_rt = 0.0, worst_flat = 0.0, worst_pot = 0.0;
    Rng rng(1005);
    for (const auto& entry : {projective_chart(2), hyperbolic_chart(2)}) {
        const auto hk = hyperkahler_transform(entry.chart);
        const MetricChart back = family_transform(hk.chart, hk.potential, 0.25 * hk.source_nu);
        for (int i = 0; i < 20; ++i)
            worst_rt = std::max(worst_rt,
                                check_transform_roundtrip(entry.chart, back, entry.sampler(rng)).residual);
    }
    {
        const ZooEntry hp = projective_chart(2);
        const auto hk = hyperkahler_transform(hp.chart);
        for (int i = 0; i < 5; ++i) {
            const Point p = hp.sampler(rng);
            worst_flat = std::max(worst_flat, riemann(hk.chart, p).max_abs());
            for (const auto& c : check_hk_potential(hk.chart, hk.potential, p))
                worst_pot = std::max(worst_pot, c.residual);
        }
    }
    report(6, worst_rt < 1e-9 && worst_flat < 1e-7 && worst_pot < 1e-7,
           "round trip " + fmt(worst_rt) + ", image flatness " + fmt(worst_flat) +
               ", potential identities " + fmt(worst_pot));
}

// 7. bundle chart (n = 2, nu = -1): quaternionic-Kahler differential
//    condition < 1e-7, |phi|^2 + nu = 0 to 1e-9, all bracket identities < 1e-7
void criterion7() {
    const ZooEntry entry = bundle_chart(2, -1.0);
    double worst_qk = 0.0, worst_len = 0.0, worst_br = 0.0;
    Rng rng(1006);
    for (int i = 0; i < 10; ++i) {
        const Point p = entry.sampler(rng);
        worst_qk = std::max(worst_qk, check_kahler_differentials(entry.chart, p).residual);
        worst_len = std::max(worst_len, std::abs(lee_norm2_at<double>(entry.chart, p) - 1.0));
        for (const auto& c : check_commutators(entry.chart, p))
            worst_br = std::max(worst_br, c.residual);
    }
    report(7, worst_qk < 1e-7 && worst_len < 1e-9 && worst_br < 1e-7,
           "bundle chart: differential condition " + fmt(worst_qk) + ", |phi|^2 + nu " +
               fmt(worst_len) + ", brackets " + fmt(worst_br));
}

// 8. randomized property suites, 1000 cases each, zero failures, < 30 s
void criterion8() {
    Timer timer;
    Rng rng(1007);
    int bad = 0;

    // quadratic relation, projector idempotency and eigen-split
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const SqMat<double> b = random_matrix(rng, 4 * n);
        const double scale = std::max(max_abs(b), 1e-300);
        if (max_abs(l_apply(l_apply(b)) - (2.0 * l_apply(b) + 3.0 * b)) / scale > 1e-12) ++bad;
        const SqMat<double> bh = 0.25 * (b + l_apply(b));
        const SqMat<double> bp = b - bh;
        if (max_abs(0.25 * (bh + l_apply(bh)) - bh) / scale > 1e-12) ++bad;
        if (max_abs(l_apply(bh) - 3.0 * bh) / scale > 1e-12) ++bad;
        if (max_abs(l_apply(bp) + bp) / scale > 1e-12) ++bad;
    }

    // symmetrizer contracts
    for (int rep = 0; rep < 1000; ++rep) {
        const int dim = 8;
        Tensor4 r(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e) r(a, b, c, e) = rng.uniform(-1, 1);
        const Tensor4 pr = big_pi(r);
        double sw = 0.0;
        for (int a = 0; a < dim && sw <= 1e-14; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e)
                        sw = std::max(sw, std::abs(pr(a, b, c, e) + pr(c, e, b, a)));
        if (sw / std::max(pr.max_abs(), 1e-300) > 1e-14) ++bad;
        if ((tau_apply(tau_apply(tau_apply(r))) - r).max_abs() != 0.0) ++bad;
        const Tensor4 t = pi_tau_outer(random_skew(rng, dim), random_skew(rng, dim));
        if (!symmetry_profile(t, 1e-12).is_curvature()) ++bad;
    }

    // derivative source terms stay hyper-Kahler
    for (int rep = 0; rep < 1000; ++rep) {
        const int dim = 8;
        std::vector<double> phi(dim);
        for (double& x : phi) x = rng.uniform(-1, 1);
        const Tensor4 rp = pi_h_tau_outer(random_s2e(rng, dim), random_s2e(rng, dim));
        const auto at = derivative_source_terms(phi, random_s2e(rng, dim), rp);
        for (const Tensor4* t : {&at.a1, &at.a2, &at.a3})
            if (!symmetry_profile(*t, 1e-10).is_hyperkahler()) ++bad;
    }

    const double secs = timer.seconds();
    report(8, bad == 0 && secs < 30.0,
           "randomized property suites, " + std::to_string(bad) + " failures in 3x1000 cases, " +
               fmt(secs) + " s (cap 30 s)");
}

// 9. jet derivatives vs 4th-order finite differences on every zoo metric,
//    relative error < 1e-6 at 10 points per chart
void criterion9() {
    double worst = 0.0;
    Rng rng(1008);
    ZooParams params;
    params.n = 2;
    params.p = 1.5;
    params.nu = -1.0;
    for (const auto& name : zoo_names()) {
        const ZooEntry entry = make_zoo_entry(name, params);
        for (int i = 0; i < 10; ++i) {
            const Point p = entry.sampler(rng);
            for (const auto& c : fd_metric_check(entry.chart, p))
                if (c.identity == "metric_gradient_vs_fd") worst = std::max(worst, c.residual);
        }
    }
    report(9, worst < 1e-6,
           "metric derivatives vs finite differences on every zoo chart, max rel err " +
               fmt(worst));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (failures == 0) {
        std::printf("acceptance: all 9 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
