#include <random>

#include "doctest.h"
#include "torlab/bls.hpp"

using namespace torlab;

TEST_CASE("catalog curvatures") {
    cd t(0.3, -0.2);
    double s = 1e-3;
    CHECK(chern_curvature_fd(field_identity(3), t, s).norm() < 1e-12);
    // K = −∂_t̄(h⁻¹∂_t h) = −a·Id for e^{a|t|²}
    MatC K = chern_curvature_fd(field_exp_scalar(2, 0.5), t, s);
    CHECK((K + 0.5 * MatC::Identity(2, 2)).norm() <= 2 * s * s);
    MatC D = chern_curvature_fd(field_exp_diag(1.0, -2.0), t, s);
    CHECK(std::abs(D(0, 0) + 1.0) <= 2 * s * s);
    CHECK(std::abs(D(1, 1) - 2.0) <= 4 * s * s);
    CHECK(std::abs(D(0, 1)) < 1e-10);
    CHECK_THROWS_AS(chern_curvature_fd(field_exp_scalar(2), t, 1e-7), Error);
}

TEST_CASE("Gauss-Griffiths on subfields") {
    std::mt19937 rng(11);
    double s = 1e-3;
    for (const auto& F : {field_rotating_line(), field_random(4, 2, rng), field_random(3, 1, rng)}) {
        for (cd t : {cd(0, 0), cd(0.2, 0.1), cd(-0.1, 0.3)}) {
            auto g = gauss_griffiths_check(F, t, s);
            CHECK(g.residual <= 10 * s * s);
            // the subfield curvature drops by the sff term, which is PSD
            CHECK(min_eig(g.sff) >= -1e-10);
            CHECK(curvature_hermitian_defect(F, t, s) <= 10 * s * s);
            CHECK(metric_compatibility_defect(F, t, s, rng) <= 10 * s * s);
        }
    }
    // rotating line in the flat-twisted plane: the second fundamental form is nonzero
    auto g = gauss_griffiths_check(field_rotating_line(), cd(0.1, 0), s);
    CHECK(g.sff(0, 0).real() > 1e-3);
}

TEST_CASE("frame that drops rank is rejected") {
    FiniteBLSField F;
    F.ambient_dim = 2;
    F.metric = [](cd) { return MatC(MatC::Identity(2, 2)); };
    F.frame = [](cd t) {
        MatC V(2, 2);
        V << 1, 0, 0, t;
        return V;
    };
    CHECK_THROWS_AS(gauss_griffiths_check(F, cd(0, 0), 1e-3), Error);
}

TEST_CASE("Schur complement and rank-k positivity") {
    std::mt19937 rng(5);
    auto A = random_nakano_positive(2, 1, 2, 0.1, rng);
    MatC S = schur_complement(A);
    CHECK(S.rows() == 4);
    CHECK(min_eig(S) > 0);
    auto r = schur_complement_demailly(A, 2, rng);
    CHECK(r.is_k_positive);
    CHECK(r.min_value == doctest::Approx(min_eig(S)).epsilon(1e-8));

    HermitianFormOnTensor Z;
    Z.m1 = 1, Z.m2 = 1, Z.r = 1;
    Z.Phi = MatC::Identity(2, 2);
    Z.Phi(1, 1) = 0;
    Z.phi = MatC::Identity(1, 1);
    CHECK_THROWS_AS(schur_complement(Z), Error);
}

TEST_CASE("Griffiths but not Nakano") {
    auto G = griffiths_not_nakano(1.5);
    CHECK(G.m2 == 0);
    std::mt19937 rng(1);
    auto k1 = schur_complement_demailly(G, 1, rng);
    auto k2 = schur_complement_demailly(G, 2, rng);
    CHECK(k1.is_k_positive);
    CHECK(k1.min_value == doctest::Approx(0.25).epsilon(1e-6));
    CHECK_FALSE(k2.is_k_positive);
    CHECK(k2.min_value == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(rank_k_min_bruteforce(schur_complement(G), 2, 2, 1) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("ALS agrees with the brute-force oracle") {
    std::mt19937 rng(2024);
    auto cases = demailly_battery(21, rng, 20);
    CHECK(cases.size() == 21);
    int bad = 0, pos = 0, neg = 0;
    for (const auto& c : cases) {
        bad += !c.agree();
        (c.oracle_positive ? pos : neg)++;
        // ALS is a minimization, so it never undercuts the true minimum by more than roundoff
        CHECK(c.als_min >= c.oracle_min - 1e-3 * (1 + std::abs(c.oracle_min)));
    }
    CHECK(bad == 0);
    CHECK(pos > 0);
    CHECK(neg > 0);
}
