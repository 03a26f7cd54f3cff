#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qkgeo/transforms.hpp"
#include "qkgeo/zoo.hpp"

using namespace qkgeo;

TEST_CASE("hyper-Kahler transform of the projective chart is flat", "[transforms]") {
    const ZooEntry hp = projective_chart(2);
    const auto hk = hyperkahler_transform(hp.chart);
    Rng rng(71);
    for (int rep = 0; rep < 3; ++rep) {
        const Point p = hp.sampler(rng);
        // the derived metric is the Euclidean form itself in these coordinates
        const auto g0 = hk.chart.metric<double>(p);
        REQUIRE(max_abs(g0 - SqMat<double>::identity(8)) < 1e-10);
        // flatness via the curvature tensor
        const Tensor4 r = riemann(hk.chart, p);
        REQUIRE(r.max_abs() < 1e-7);
    }
}

TEST_CASE("derived potential satisfies the hyper-Kahler potential identities", "[transforms]") {
    const ZooEntry hp = projective_chart(2);
    const auto hk = hyperkahler_transform(hp.chart);
    Rng rng(72);
    for (int rep = 0; rep < 2; ++rep) {
        const Point p = hp.sampler(rng);
        for (const auto& c : check_hk_potential(hk.chart, hk.potential, p)) {
            INFO(c.identity << " residual " << c.residual);
            REQUIRE(c.pass());
        }
    }
}

TEST_CASE("signature of the transform image follows the sign of nu (|phi|^2 + nu)", "[transforms]") {
    // On both model charts nu (|phi|^2 + nu) = 16 (1 + sigma r^2) > 0 on the
    // domain, so the derived metric is Riemannian; eigenvalue signs verify
    // it. (For the hyperbolic chart it is in fact the flat metric itself.)
    Rng rng(73);
    for (const auto& e : {projective_chart(2), hyperbolic_chart(2)}) {
        const auto hk = hyperkahler_transform(e.chart);
        const double nu = hk.source_nu;
        for (int rep = 0; rep < 5; ++rep) {
            const Point p = e.sampler(rng);
            const double pred = nu * (lee_norm2_at<double>(e.chart, p) + nu);
            REQUIRE(pred > 0.0);
            const auto ev = sym_eigenvalues(hk.chart.metric<double>(p));
            int pos = 0;
            for (double x : ev) pos += x > 0 ? 1 : 0;
            REQUIRE(pos == 8);
        }
    }
}

TEST_CASE("bundle chart is rejected by the hyper-Kahler transform", "[transforms]") {
    const ZooEntry t6 = bundle_chart(2, -1.0);
    REQUIRE_THROWS_AS(hyperkahler_transform(t6.chart), ChartError);
}

TEST_CASE("family transform rejects p = 0 and a flat source", "[transforms]") {
    const ZooEntry flat = flat_hn(2);
    REQUIRE_THROWS_AS(family_transform(flat.chart, flat_hk_potential(), 0.0), ChartError);
    // the hyper-Kahler transform needs nonzero scalar curvature
    REQUIRE_THROWS_AS(hyperkahler_transform(flat.chart), ChartError);
}

TEST_CASE("family transform of the flat chart hits the model charts", "[transforms]") {
    const ZooEntry flat = flat_hn(2);
    const ScalarField mu = flat_hk_potential();
    const MetricChart gp1 = family_transform(flat.chart, mu, 1.0);
    const MetricChart gm1 = family_transform(flat.chart, mu, -1.0);
    const ZooEntry hp = projective_chart(2);
    const ZooEntry hh = hyperbolic_chart(2);
    Rng rng(74);
    for (int rep = 0; rep < 5; ++rep) {
        const Point pp = hp.sampler(rng);
        REQUIRE(max_abs(gp1.metric<double>(pp) - hp.chart.metric<double>(pp)) < 1e-10);
        const Point pm = hh.sampler(rng);
        REQUIRE(max_abs(gm1.metric<double>(pm) - hh.chart.metric<double>(pm)) < 1e-10);
    }
}

TEST_CASE("family transform carries reduced scalar 4p", "[transforms]") {
    const ZooEntry flat = flat_hn(2);
    const MetricChart g = family_transform(flat.chart, flat_hk_potential(), -0.25);
    Rng rng(75);
    const Point p = rng.ball_point(8, 0.8);
    REQUIRE(reduced_scalar(g, p) == Catch::Approx(-1.0).margin(1e-7));
}

TEST_CASE("round trip: model chart -> hyper-Kahler -> family at p = nu/4", "[transforms]") {
    Rng rng(76);
    for (const auto& e : {projective_chart(2), hyperbolic_chart(2), gp_chart(2, 1.5)}) {
        const auto hk = hyperkahler_transform(e.chart);
        const MetricChart back = family_transform(hk.chart, hk.potential, 0.25 * hk.source_nu);
        for (int rep = 0; rep < 5; ++rep) {
            const Point p = e.sampler(rng);
            const auto c = check_transform_roundtrip(e.chart, back, p);
            INFO(e.chart.name << " residual " << c.residual);
            REQUIRE(c.pass());
        }
    }
}

TEST_CASE("family chart closed forms coincide with the defining transform", "[transforms]") {
    const ZooEntry flat = flat_hn(2);
    const ScalarField mu = flat_hk_potential();
    Rng rng(79);
    for (double p : {1.5, -0.4}) {
        const MetricChart via_transform = family_transform(flat.chart, mu, p);
        const ZooEntry gp = gp_chart(2, p);
        for (int rep = 0; rep < 5; ++rep) {
            const Point x = gp.sampler(rng);
            REQUIRE(max_abs(gp.chart.metric<double>(x) - via_transform.metric<double>(x)) < 1e-13);
            const auto a = gp.chart.lee_closed_form(x);
            const auto b = via_transform.lee_closed_form(x);
            for (std::size_t i = 0; i < a.size(); ++i)
                REQUIRE(a[i] == Catch::Approx(b[i]).margin(1e-12));
            const double fa = gp.chart.lee_potential->operator()<double>(x);
            const double fb = via_transform.lee_potential->operator()<double>(x);
            REQUIRE(fa == Catch::Approx(fb).margin(1e-12));
        }
    }
}

TEST_CASE("potential identities hold on every admissible zoo chart's image", "[transforms]") {
    Rng rng(80);
    for (const auto& e : {projective_chart(2), hyperbolic_chart(2), gp_chart(2, -0.5)}) {
        const auto hk = hyperkahler_transform(e.chart);
        for (int rep = 0; rep < 2; ++rep) {
            const Point p = e.sampler(rng);
            for (const auto& c : check_hk_potential(hk.chart, hk.potential, p)) {
                INFO(e.chart.name << " / " << c.identity << " residual " << c.residual);
                REQUIRE(c.pass());
            }
        }
    }
}

TEST_CASE("round trip: flat -> family -> hyper-Kahler returns the flat metric", "[transforms]") {
    const ZooEntry flat = flat_hn(2);
    const MetricChart gp = family_transform(flat.chart, flat_hk_potential(), 2.0);
    const auto back = hyperkahler_transform(gp);
    Rng rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        const Point p = rng.ball_point(8, 1.0);
        const auto g0 = back.chart.metric<double>(p);
        REQUIRE(max_abs(g0 - SqMat<double>::identity(8)) < 1e-9);
    }
}

TEST_CASE("derived potential matches the closed form on the projective chart", "[transforms]") {
    // mu = 2/nu^2 (|phi|^2 + nu) = (1 + |x|^2) / 2 on the projective chart
    const ZooEntry hp = projective_chart(2);
    const auto hk = hyperkahler_transform(hp.chart);
    Rng rng(78);
    for (int rep = 0; rep < 5; ++rep) {
        const Point p = hp.sampler(rng);
        double r2 = 0.0;
        for (double c : p) r2 += c * c;
        const double mu = hk.potential.operator()<double>(p);
        REQUIRE(mu == Catch::Approx(0.5 * (1.0 + r2)).margin(1e-10));
    }
}
