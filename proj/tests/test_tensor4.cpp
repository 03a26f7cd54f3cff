#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qkgeo/rng.hpp"
#include "qkgeo/tensor4.hpp"

using namespace qkgeo;

namespace {

Tensor4 random_tensor4(Rng& rng, int dim) {
    Tensor4 t(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c)
                for (int e = 0; e < dim; ++e) t(a, b, c, e) = rng.uniform(-1, 1);
    return t;
}

// random algebraic curvature tensor, built from the symmetric-outer route
Tensor4 random_curvature(Rng& rng, int dim) {
    const BilinearForm s1 = random_symmetric(rng, dim);
    const BilinearForm s2 = random_symmetric(rng, dim);
    return pi_tau_outer(s1, s2) + pi_tau_outer(random_skew(rng, dim), random_skew(rng, dim));
}

Tensor4 random_hk_curvature(Rng& rng, int dim) {
    return pi_h_tau_outer(random_s2e(rng, dim), random_s2e(rng, dim)) +
           pi_h_tau_outer(random_s2e(rng, dim), random_s2e(rng, dim));
}

// alternating projections onto {skew in first pair} and {first Bianchi};
// converges to the intersection, which is the admissible domain of pi_project
Tensor4 random_pi_admissible(Rng& rng, int dim) {
    Tensor4 t = random_tensor4(rng, dim);
    for (int it = 0; it < 200; ++it) {
        Tensor4 u(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e) u(a, b, c, e) = 0.5 * (t(a, b, c, e) - t(b, a, c, e));
        Tensor4 v(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e)
                        v(a, b, c, e) = u(a, b, c, e) -
                                        (u(a, b, c, e) + u(b, c, a, e) + u(c, a, b, e)) / 3.0;
        t = v;
    }
    return t;
}

// Independent dense oracle for (1 + L) acting on a matrix slice, going
// through explicit structure matrices instead of the block sign tables.
SqMat<double> one_plus_l_oracle(const SqMat<double>& s) {
    SqMat<double> r = s;
    for (const auto& a : standard_structure_triple<double>(s.size()))
        r += matmul(transpose(a), matmul(s, a));
    return r;
}

}  // namespace

TEST_CASE("big_pi matches its 4-term index oracle", "[tensor4]") {
    Rng rng(11);
    const Tensor4 r = random_tensor4(rng, 8);
    const Tensor4 p = big_pi(r);
    REQUIRE(p(0, 1, 2, 3) ==
            Catch::Approx(r(0, 1, 2, 3) + r(1, 0, 3, 2) - r(3, 2, 0, 1) - r(2, 3, 1, 0)).epsilon(1e-15));
    for (int rep = 0; rep < 200; ++rep) {
        const int a = static_cast<int>(rng.next_u64() % 8), b = static_cast<int>(rng.next_u64() % 8);
        const int c = static_cast<int>(rng.next_u64() % 8), e = static_cast<int>(rng.next_u64() % 8);
        REQUIRE(p(a, b, c, e) ==
                Catch::Approx(r(a, b, c, e) + r(b, a, e, c) - r(e, c, a, b) - r(c, e, b, a)).margin(1e-15));
    }
}

TEST_CASE("big_pi output is skew under pair swap with transpose", "[tensor4]") {
    Rng rng(12);
    const Tensor4 p = big_pi(random_tensor4(rng, 8));
    double res = 0.0;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c)
                for (int e = 0; e < 8; ++e) res = std::max(res, std::abs(p(a, b, c, e) + p(c, e, b, a)));
    REQUIRE(res < 1e-14 * p.max_abs());
}

TEST_CASE("big_pi acts as 4 on curvature tensors and kills symmetric tensors", "[tensor4]") {
    Rng rng(13);
    const Tensor4 r = random_curvature(rng, 8);
    const Tensor4 p = big_pi(r);
    REQUIRE((p - 4.0 * r).max_abs() < 1e-12 * r.max_abs());

    // fully symmetric input: S(a,b,c,e) = v_a v_b v_c v_e
    std::vector<double> v(8);
    for (double& x : v) x = rng.uniform(-1, 1);
    Tensor4 s(8);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c)
                for (int e = 0; e < 8; ++e) s(a, b, c, e) = v[a] * v[b] * v[c] * v[e];
    REQUIRE(big_pi(s).max_abs() < 1e-14);
}

TEST_CASE("tau is the order-3 slot cycle", "[tensor4]") {
    Rng rng(14);
    const Tensor4 r = random_tensor4(rng, 4);
    const Tensor4 r3 = tau_apply(tau_apply(tau_apply(r)));
    REQUIRE((r3 - r).max_abs() == 0.0);

    // tau(g (x) g) picks out g(Y,Z) g(X,W)
    const SqMat<double> g = SqMat<double>::identity(4);
    const Tensor4 t = tau_apply(outer(g, g));
    REQUIRE(t(0, 1, 0, 1) == 0.0);
    REQUIRE(t(0, 1, 1, 0) == 1.0);
}

TEST_CASE("curvature tensors satisfy the first Bianchi identity", "[tensor4]") {
    Rng rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        const Tensor4 r = random_curvature(rng, 8);
        const Tensor4 b = r + tau_apply(r) + tau_apply(tau_apply(r));
        REQUIRE(b.max_abs() < 1e-12 * r.max_abs());
    }
}

TEST_CASE("contract_c on trivial and structured forms", "[tensor4]") {
    Rng rng(16);
    const int dim = 8;
    const Tensor4 r = random_tensor4(rng, dim);

    SECTION("zero form gives the zero tensor") {
        const BilinearForm zero(dim);
        REQUIRE(contract_c(zero, r).max_abs() == 0.0);
    }
    SECTION("the metric dualizes to the identity") {
        const BilinearForm g(SqMat<double>::identity(dim));
        REQUIRE((contract_c(g, r) - r).max_abs() == 0.0);
    }
    SECTION("a Kahler form dualizes to its structure operator") {
        const SqMat<double> imat = standard_structure_matrix<double>(Axis::I, dim);
        const BilinearForm om(transpose(imat));
        const Tensor4 r0 = model_curvature_tensor(2);
        const Tensor4 c = contract_c(om, r0);
        for (int rep = 0; rep < 100; ++rep) {
            const int a = static_cast<int>(rng.next_u64() % dim), b = static_cast<int>(rng.next_u64() % dim);
            const int cc = static_cast<int>(rng.next_u64() % dim), e = static_cast<int>(rng.next_u64() % dim);
            double expect = 0.0;
            for (int f = 0; f < dim; ++f) expect += r0(a, b, cc, f) * imat(f, e);
            REQUIRE(c(a, b, cc, e) == Catch::Approx(expect).margin(1e-14));
        }
    }
    SECTION("explicit chart metric reduces to the flat fast path") {
        const BilinearForm phi = random_skew(rng, dim);
        const SqMat<double> g = SqMat<double>::identity(dim);
        REQUIRE((contract_c(phi, r, g) - contract_c(phi, r)).max_abs() < 1e-13);
    }
}

TEST_CASE("iota contractions match index slices", "[tensor4]") {
    Rng rng(17);
    const int dim = 8;
    const Tensor4 r = random_tensor4(rng, dim);

    std::vector<double> zero(dim, 0.0);
    REQUIRE(iota_contract(zero, r).max_abs() == 0.0);

    std::vector<double> e0(dim, 0.0);
    e0[0] = 1.0;
    const Tensor3 s = iota_contract(e0, r);
    for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
            for (int e = 0; e < dim; ++e) REQUIRE(s(b, c, e) == r(0, b, c, e));

    std::vector<double> x(dim), y(dim);
    for (double& v : x) v = rng.uniform(-1, 1);
    for (double& v : y) v = rng.uniform(-1, 1);
    const SqMat<double> m = iota_contract2(x, y, r);
    for (int rep = 0; rep < 50; ++rep) {
        const int c = static_cast<int>(rng.next_u64() % dim), e = static_cast<int>(rng.next_u64() % dim);
        double expect = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) expect += x[a] * y[b] * r(a, b, c, e);
        REQUIRE(m(c, e) == Catch::Approx(expect).margin(1e-13));
    }

    REQUIRE_THROWS_AS(iota_contract(std::vector<double>(3, 1.0), r), std::invalid_argument);
}

TEST_CASE("pi_project fixes curvature tensors and is idempotent", "[tensor4]") {
    Rng rng(18);
    const int dim = 8;
    for (int rep = 0; rep < 10; ++rep) {
        const Tensor4 r = random_curvature(rng, dim);
        REQUIRE((pi_project(r) - r).max_abs() < 1e-11 * r.max_abs());
    }
    for (int rep = 0; rep < 10; ++rep) {
        const Tensor4 t = random_pi_admissible(rng, dim);
        const Tensor4 p = pi_project(t, 1e-9);
        const auto prof = symmetry_profile(p);
        REQUIRE(prof.is_curvature());
        REQUIRE((pi_project(p) - p).max_abs() < 1e-11 * p.max_abs());
    }
}

TEST_CASE("pi_project rejects inadmissible input with the failing residual", "[tensor4]") {
    Rng rng(19);
    const BilinearForm phi = random_skew(rng, 8);
    const BilinearForm psi = random_skew(rng, 8);
    // Phi (x) Psi is skew in the first pair but fails the Bianchi identity
    const Tensor4 bad = outer(phi.matrix(), psi.matrix());
    REQUIRE_THROWS_AS(pi_project(bad), PreconditionError);
    try {
        pi_project(bad);
    } catch (const PreconditionError& e) {
        REQUIRE(std::string(e.what()).find("bianchi") != std::string::npos);
    }
}

TEST_CASE("pi_h_c special cases and hyper-Kahler output", "[tensor4]") {
    Rng rng(20);
    const int dim = 8;
    const Tensor4 rp = random_hk_curvature(rng, dim);

    SECTION("Phi = g reproduces the tensor") {
        const BilinearForm g(SqMat<double>::identity(dim));
        REQUIRE((pi_h_c(g, rp) - rp).max_abs() < 1e-11 * rp.max_abs());
    }
    SECTION("Phi = 0 gives zero") {
        const BilinearForm zero(dim);
        REQUIRE(pi_h_c(zero, rp).max_abs() == 0.0);
    }
    SECTION("random H-Hermitian symmetric Phi keeps the output hyper-Kahler") {
        for (int rep = 0; rep < 10; ++rep) {
            const BilinearForm phi = project_hhermitian(random_symmetric(rng, dim));
            const Tensor4 out = pi_h_c(phi, rp);
            REQUIRE(symmetry_profile(out, 1e-10).is_hyperkahler());
        }
    }
    SECTION("non-hyper-Kahler tensor argument is rejected") {
        REQUIRE_THROWS_AS(pi_h_c(BilinearForm(SqMat<double>::identity(dim)), model_curvature_tensor(2)),
                          PreconditionError);
    }
}

TEST_CASE("pi_tau_outer produces algebraic curvature tensors", "[tensor4]") {
    Rng rng(21);
    const int dim = 8;

    SECTION("metric with itself gives the constant-curvature tensor") {
        const BilinearForm g(SqMat<double>::identity(dim));
        const Tensor4 t = pi_tau_outer(g, g);
        // 1/4 Pi tau g (x) g = 1/2 (g(X,W) g(Y,Z) - g(X,Z) g(Y,W))
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e) {
                        const double expect =
                            0.5 * ((a == e && b == c ? 1.0 : 0.0) - (a == c && b == e ? 1.0 : 0.0));
                        REQUIRE(t(a, b, c, e) == Catch::Approx(expect).margin(1e-14));
                    }
        REQUIRE(symmetry_profile(t).is_curvature());
    }
    SECTION("zero inputs give zero") {
        const BilinearForm zero(dim);
        REQUIRE(pi_tau_outer(zero, zero).max_abs() == 0.0);
    }
    SECTION("random skew pairs satisfy Bianchi to 1e-12") {
        for (int rep = 0; rep < 20; ++rep) {
            const Tensor4 t = pi_tau_outer(random_skew(rng, dim), random_skew(rng, dim));
            const Tensor4 b = t + tau_apply(t) + tau_apply(tau_apply(t));
            REQUIRE(b.max_abs() < 1e-12 * std::max(t.max_abs(), 1e-30));
            REQUIRE(symmetry_profile(t, 1e-12).is_curvature());
        }
    }
    SECTION("random symmetric pairs give curvature tensors") {
        for (int rep = 0; rep < 20; ++rep) {
            const Tensor4 t = pi_tau_outer(random_symmetric(rng, dim), random_symmetric(rng, dim));
            REQUIRE(symmetry_profile(t, 1e-12).is_curvature());
        }
    }
    SECTION("mixed symmetry is rejected") {
        REQUIRE_THROWS_AS(pi_tau_outer(random_skew(rng, dim), random_symmetric(rng, dim)),
                          PreconditionError);
    }
}

TEST_CASE("pi_h_tau_outer against an independent dense oracle", "[tensor4]") {
    Rng rng(22);
    const int dim = 8;
    const BilinearForm phi = random_s2e(rng, dim);
    const BilinearForm psi = random_s2e(rng, dim);
    const Tensor4 lib = pi_h_tau_outer(phi, psi);

    // oracle: assemble the two-term formula by raw loops and matrix algebra
    Tensor4 core(dim);
    const Tensor4 op = outer(phi.matrix(), psi.matrix());
    const Tensor4 top = tau_apply(op);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c)
                for (int e = 0; e < dim; ++e)
                    core(a, b, c, e) = top(a, b, c, e) + top(b, a, e, c) - top(e, c, a, b) - top(c, e, b, a);
    Tensor4 oracle(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            SqMat<double> slice(dim);
            for (int c = 0; c < dim; ++c)
                for (int e = 0; e < dim; ++e) slice(c, e) = core(a, b, c, e);
            const SqMat<double> proj = one_plus_l_oracle(slice);
            for (int c = 0; c < dim; ++c)
                for (int e = 0; e < dim; ++e)
                    oracle(a, b, c, e) =
                        (proj(c, e) - 2.0 * (phi(a, b) * psi(c, e) + psi(a, b) * phi(c, e))) / 24.0;
        }
    REQUIRE((lib - oracle).max_abs() < 1e-14);

    SECTION("outputs are hyper-Kahler curvature tensors") {
        REQUIRE(symmetry_profile(lib, 1e-10).is_hyperkahler());
        for (int rep = 0; rep < 10; ++rep) {
            const Tensor4 t = pi_h_tau_outer(random_s2e(rng, dim), random_s2e(rng, dim));
            REQUIRE(symmetry_profile(t, 1e-10).is_hyperkahler());
        }
    }
    SECTION("zero input gives zero, non-S2E input is rejected") {
        REQUIRE(pi_h_tau_outer(BilinearForm(dim), BilinearForm(dim)).max_abs() == 0.0);
        REQUIRE_THROWS_AS(pi_h_tau_outer(random_skew(rng, dim), random_skew(rng, dim)),
                          PreconditionError);
    }
}

TEST_CASE("model tensor calibration: scalar curvature 16 n (n+2)", "[tensor4][calibration]") {
    REQUIRE(scalar_curvature_flat(model_curvature_tensor(1)) == Catch::Approx(48.0).epsilon(1e-12));
    REQUIRE(scalar_curvature_flat(model_curvature_tensor(2)) == Catch::Approx(128.0).epsilon(1e-12));
    REQUIRE(scalar_curvature_flat(model_curvature_tensor(3)) == Catch::Approx(240.0).epsilon(1e-12));
    REQUIRE_THROWS_AS(model_curvature_tensor(4), std::invalid_argument);
    REQUIRE_THROWS_AS(model_curvature_tensor(0), std::invalid_argument);
}

TEST_CASE("model tensor is quaternionic Kahler but not hyper-Kahler", "[tensor4]") {
    for (int n = 1; n <= 3; ++n) {
        const Tensor4 r0 = model_curvature_tensor(n);
        const auto prof = symmetry_profile(r0, 1e-12);
        REQUIRE(prof.is_curvature());
        REQUIRE_FALSE(prof.hhermitian_first_ok());
        REQUIRE_FALSE(prof.hhermitian_second_ok());

        // Einstein: Ric = (s0 / 4n) g
        const SqMat<double> ric = ricci_flat(r0);
        const double factor = 16.0 * n * (n + 2) / (4.0 * n);
        SqMat<double> expect = SqMat<double>::identity(4 * n);
        expect *= factor;
        REQUIRE(max_abs(ric - expect) < 1e-12 * factor);
    }
}

TEST_CASE("model tensor agrees with the classical space-form expression", "[tensor4]") {
    // R0(X,Y,Z,W) = g(X,W) g(Y,Z) - g(X,Z) g(Y,W)
    //   + sum_A ( Om_A(X,W) Om_A(Y,Z) - Om_A(X,Z) Om_A(Y,W) - 2 Om_A(X,Y) Om_A(Z,W) )
    const int n = 2, dim = 8;
    const Tensor4 r0 = model_curvature_tensor(n);
    std::array<SqMat<double>, 3> om;
    for (int a = 0; a < 3; ++a)
        om[a] = transpose(standard_structure_matrix<double>(static_cast<Axis>(a), dim));
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c)
                for (int e = 0; e < dim; ++e) {
                    double expect = (a == e && b == c ? 1.0 : 0.0) - (a == c && b == e ? 1.0 : 0.0);
                    for (int ax = 0; ax < 3; ++ax)
                        expect += om[ax](a, e) * om[ax](b, c) - om[ax](a, c) * om[ax](b, e) -
                                  2.0 * om[ax](a, b) * om[ax](c, e);
                    REQUIRE(r0(a, b, c, e) == Catch::Approx(expect).margin(1e-13));
                }
}

TEST_CASE("A-term builders", "[tensor4]") {
    Rng rng(23);
    const int dim = 8;
    const Tensor4 rp = random_hk_curvature(rng, dim);

    SECTION("all zero inputs give zero outputs") {
        const auto at = derivative_source_terms(std::vector<double>(dim, 0.0), BilinearForm(dim), rp);
        REQUIRE(at.a1.max_abs() == 0.0);
        REQUIRE(at.a2.max_abs() == 0.0);
        REQUIRE(at.a3.max_abs() == 0.0);
    }
    SECTION("Phi = 0 kills A2, A3 exactly but not A1") {
        std::vector<double> phi(dim);
        for (double& x : phi) x = rng.uniform(-1, 1);
        const auto at = derivative_source_terms(phi, BilinearForm(dim), rp);
        REQUIRE(at.a2.max_abs() == 0.0);
        REQUIRE(at.a3.max_abs() == 0.0);
        REQUIRE(at.a1.max_abs() > 1e-6);
    }
    SECTION("each A-term is a hyper-Kahler curvature tensor") {
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> phi(dim);
            for (double& x : phi) x = rng.uniform(-1, 1);
            const auto at = derivative_source_terms(phi, random_s2e(rng, dim), random_hk_curvature(rng, dim));
            REQUIRE(symmetry_profile(at.a1, 1e-10).is_hyperkahler());
            REQUIRE(symmetry_profile(at.a2, 1e-10).is_hyperkahler());
            REQUIRE(symmetry_profile(at.a3, 1e-10).is_hyperkahler());
        }
    }
    SECTION("non-hyper-Kahler R' is rejected") {
        REQUIRE_THROWS_AS(derivative_source_terms(std::vector<double>(dim, 0.0), BilinearForm(dim), model_curvature_tensor(2)),
                          PreconditionError);
    }
}

TEST_CASE("operations are linear in each tensor argument", "[tensor4]") {
    Rng rng(24);
    const int dim = 8;
    const Tensor4 r = random_tensor4(rng, dim), s = random_tensor4(rng, dim);
    const double c = rng.uniform(-2, 2);
    REQUIRE((big_pi(r + c * s) - (big_pi(r) + c * big_pi(s))).max_abs() < 1e-13);
    REQUIRE((tau_apply(r + c * s) - (tau_apply(r) + c * tau_apply(s))).max_abs() < 1e-13);
    const BilinearForm phi = random_skew(rng, dim);
    REQUIRE((contract_c(phi, r + c * s) - (contract_c(phi, r) + c * contract_c(phi, s))).max_abs() <
            1e-12);
}
