#include <random>

#include "doctest.h"
#include "torlab/curvature.hpp"

using namespace torlab;

// Closed forms: the Gram of the flat frame dz is 2Y and the theta frame of L^d has Gram ∝ Y^{1/2}·Id,
// so Θ = −∂_t̄(G⁻¹∂_t G) equals 1/(4Y²) and Id/(8Y²) respectively.

TEST_CASE("flat elliptic family") {
    cd t(0.2, 1.1);
    double Y = t.imag();
    auto fam = elliptic_family(t, BundleKind::Flat, 0);
    auto ctx = make_context(fam, t, default_disc(fam));
    auto R = curvature_H(ctx, trivialization_lift(ctx));
    REQUIRE(R.rank == 1);
    CHECK(R.theta_H(0, 0).real() == doctest::Approx(1 / (4 * Y * Y)).epsilon(1e-12));
    CHECK(R.residual_routes < 1e-12);
    CHECK(R.term_theta_h.norm() == 0.0);
}

TEST_CASE("positive bundles of degree one and two") {
    cd t(0.2, 1.1);
    double Y = t.imag();
    for (int d = 1; d <= 2; ++d) {
        auto fam = elliptic_family(t, BundleKind::Positive, d);
        auto ctx = make_context(fam, t, Disc::grid(32, 8));
        auto lift = trivialization_lift(ctx);
        auto R = curvature_H(ctx, lift);
        REQUIRE(R.rank == d);
        MatC want = MatC::Identity(d, d) / (8 * Y * Y);
        CHECK((R.theta_H - want).norm() / want.norm() < 1e-4);
        CHECK((R.theta_H_bly - want).norm() / want.norm() < 1e-4);
        CHECK(R.nakano_min_eig >= -1e-6);
        CHECK(R.sff_min_eig >= -1e-10);
        CHECK(R.sff_routes <= 1e-6);
        CHECK(R.hermitian_defect < 1e-8);
        // bilinear in (σ, τ̄)
        cd s(0, 2), u(1, 1);
        auto R2 = curvature_H(ctx, lift, s, u);
        CHECK((R2.theta_H - s * std::conj(u) * R.theta_H).norm() < 1e-12 * R2.theta_H.norm());
        std::mt19937 rng(9);
        auto l2 = trivialization_lift(ctx, {random_trig(1, 2, 0.3, rng)});
        // coarse grid; the 1e-5 bound is reached at N = 64
        CHECK(lift_independence_check(ctx, lift, l2) <= 1e-3);
        auto X = xu_wang_bound(ctx, lift);
        CHECK(X.margin >= -1e-8);
    }
}

TEST_CASE("trivial family and empty fibers") {
    cd t(0.2, 1.1);
    auto cf = constant_family(t, cd(0.1, 0.9), BundleKind::Flat, 0);
    auto ctx = make_context(cf, t, default_disc(cf));
    auto R = curvature_H(ctx, trivialization_lift(ctx));
    CHECK(R.theta_H.norm() < 1e-14);
    VecR chi(2);
    chi << 0.5, 0.0;
    auto ef = elliptic_family(t, BundleKind::Flat, 0, chi);
    auto c2 = make_context(ef, t, default_disc(ef));
    auto R2 = curvature_H(c2, trivialization_lift(c2));
    CHECK(R2.rank == 0);
    CHECK(R2.theta_H.size() == 0);
    CHECK_THROWS_AS(xu_wang_bound(ctx, trivialization_lift(ctx)), Error);
}

TEST_CASE("jumping family reports rank and the locus flag") {
    auto j = jumping_family(cd(0, 1));
    auto on = make_context(j, cd(0, 1), default_disc(j));
    auto R = curvature_H(on, trivialization_lift(on));
    CHECK(R.rank == 1);
    CHECK(R.near_jump);
    auto off = make_context(j, cd(0.3, 1), default_disc(j));
    auto R2 = curvature_H(off, trivialization_lift(off));
    CHECK(R2.rank == 0);
    CHECK_FALSE(R2.near_jump);
}

TEST_CASE("Hodge-Riemann relations and Lefschetz decomposition") {
    auto T = make_torus(cd(0.3, 1.2));
    auto F = make_fiber(T, make_flat_bundle(T, VecR::Zero(2)), Disc::spectral(3));
    std::mt19937 rng(2);
    std::normal_distribution<double> nd;
    auto rnd = [&](const FormSpace& S) {
        FormSection x(S);
        for (int i = 0; i < S.dim; ++i) x.coeffs(i) = cd(nd(rng), nd(rng));
        return x;
    };
    auto a10 = rnd(make_space(F, 1, 0)), a01 = rnd(make_space(F, 0, 1));
    auto h1 = hodge_riemann_check(a10), h2 = hodge_riemann_check(a01);
    CHECK(h1.residual < 1e-12);
    CHECK(h2.residual < 1e-12);
    CHECK(h1.rhs.real() > 0);
    CHECK(h2.rhs.real() < 0);

    MatC Om(2, 2);
    Om << cd(0, 1), cd(0.1, 0.05), cd(0.1, 0.05), cd(0.2, 1.3);
    auto T2 = make_torus(2, Om);
    auto F2 = make_fiber(T2, make_flat_bundle(T2, VecR::Zero(4)), Disc::spectral(1));
    auto a11 = rnd(make_space(F2, 1, 1));
    auto parts = lefschetz_decompose(a11);
    REQUIRE(parts.size() == 2);
    FormSection sum = parts[0];
    sum.coeffs += lefschetz_power(parts[1], 1).coeffs;
    CHECK((sum.coeffs - a11.coeffs).norm() < 1e-12 * a11.norm());
    CHECK(lefschetz_Lambda(parts[0].space).apply(parts[0]).norm() < 1e-12 * a11.norm());
    CHECK(hodge_riemann_check(parts[0]).residual < 1e-12);
    CHECK_THROWS_AS(hodge_riemann_check(a11), Error);
}
