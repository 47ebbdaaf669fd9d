#include "doctest.h"
#include "torlab/curvature.hpp"
#include "torlab/oracle.hpp"

using namespace torlab;

TEST_CASE("theta frames") {
    auto T = make_torus(cd(0, 1));
    for (int d = 1; d <= 3; ++d) {
        auto F = make_fiber(T, make_positive_bundle(T, d), Disc::grid(64, 8));
        auto th = theta_frame(cd(0, 1), d, *F);
        REQUIRE(static_cast<int>(th.g.size()) == d);
        for (double r : theta_dbar_residual(th, *F)) CHECK(r <= 1e-6);
        Eigen::SelfAdjointEigenSolver<MatC> es(theta_gram(th, *F));
        CHECK(es.eigenvalues().minCoeff() > 0);
        CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() < 1e3);
    }
    auto F = make_fiber(T, make_positive_bundle(T, 1), Disc::grid(16, 4));
    CHECK_THROWS_AS(theta_frame(cd(0, -1), 1, *F), Error);
}

TEST_CASE("closed-form flat spectra") {
    auto T = make_torus(cd(0, 1));
    VecR e = exact_flat_spectrum(T, VecR::Zero(2), 0, 0, 3);
    CHECK(e(0) == doctest::Approx(0.0));
    // four lattice neighbours at 2π² in the normalization of □_∂̄ for ω = (i/2) dz∧dz̄
    for (int i = 1; i <= 4; ++i) CHECK(e(i) == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
    CHECK(e(5) > 2 * kPi * kPi + 1);
    VecR chi(2);
    chi << 0.5, 0.0;
    VecR h = exact_flat_spectrum(T, chi, 0, 0, 3);
    CHECK(h(0) == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
    CHECK(h(1) == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
    MatC Om(2, 2);
    Om << cd(0, 1), 0, 0, cd(0, 1);
    auto T2 = make_torus(2, Om);
    CHECK(exact_flat_spectrum(T2, VecR::Zero(4), 1, 1, 1).size() == 4 * 81);
    VecR k(5);
    k << 1e-14, 2e-14, 0.5, 1.0, 2.0;
    CHECK(kernel_count(k) == 2);
}

TEST_CASE("finite-difference curvature oracle") {
    cd t(0.2, 1.1);
    auto fam = elliptic_family(t, BundleKind::Positive, 1);
    auto ctx = make_context(fam, t, Disc::grid(32, 8));
    MatC a = fd_chern_curvature_H(ctx, 1e-3), b = fd_chern_curvature_H(ctx, 5e-4);
    // halving the step moves the value by O(step²)
    CHECK((a - b).norm() / a.norm() < 10 * 1e-6);
    CHECK(a(0, 0).real() == doctest::Approx(1 / (8 * 1.21)).epsilon(1e-6));
    auto cf = constant_family(t, cd(0.1, 0.9), BundleKind::Flat, 0);
    auto cc = make_context(cf, t, default_disc(cf));
    CHECK(fd_chern_curvature_H(cc).norm() < 1e-8);
}

TEST_CASE("rank scans") {
    std::vector<cd> line;
    for (int k = 0; k <= 20; ++k) line.push_back(cd(-0.5 + 0.05 * k, 1.0));
    auto rows = rank_scan(jumping_family(cd(0, 1)), line);
    for (int k = 0; k <= 20; ++k) {
        CHECK(rows[k].rank == (k == 10 ? 1 : 0));
        CHECK(rows[k].rank == rows[k].rank_exact);
    }
    std::vector<cd> off;
    for (int k = 0; k <= 10; ++k) off.push_back(cd(0.37, 0.8 + 0.04 * k));
    for (const auto& r : rank_scan(jumping_family(cd(0, 1)), off)) CHECK(r.rank == 0);
    for (const auto& r : rank_scan(elliptic_family(cd(0, 1), BundleKind::Flat, 0), off)) CHECK(r.rank == 1);
    CHECK_THROWS_AS(rank_scan(elliptic_family(cd(0, 1), BundleKind::Positive, 1), off), Error);
}
