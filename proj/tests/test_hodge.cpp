#include <random>

#include "doctest.h"
#include "torlab/identities.hpp"
#include "torlab/oracle.hpp"

using namespace torlab;

namespace {

VecC random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    VecC x(n);
    for (int i = 0; i < n; ++i) x(i) = cd(nd(rng), nd(rng));
    return x;
}

FiberPtr flat_fiber(cd t, VecR chi) {
    auto T = make_torus(t);
    return make_fiber(T, make_flat_bundle(T, chi), Disc::spectral(8));
}

}  // namespace

TEST_CASE("harmonic dimensions on flat bundles") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    CHECK(build_hodge(make_space(F, 0, 0)).harmonic_dim() == 1);
    CHECK(build_hodge(make_space(F, 1, 0)).harmonic_dim() == 1);
    VecR chi(2);
    chi << 0.5, 0.0;
    auto G = flat_fiber(cd(0, 1), chi);
    CHECK(build_hodge(make_space(G, 1, 0)).harmonic_dim() == 0);
}

TEST_CASE("harmonic projector is an orthogonal projector") {
    auto F = flat_fiber(cd(0.3, 0.8), VecR::Zero(2));
    auto P = build_hodge(make_space(F, 1, 0));
    VecC x = random_vec(P.space.dim, 1), y = random_vec(P.space.dim, 2);
    VecC px = P.project(x);
    CHECK((P.project(px) - px).norm() < 1e-12 * x.norm());
    CHECK(std::abs(y.dot(px) - P.project(y).dot(x)) < 1e-10 * x.norm() * y.norm());
}

TEST_CASE("Green operator commutes with dbar") {
    auto F = flat_fiber(cd(0.3, 0.8), VecR::Zero(2));
    auto P0 = build_hodge(make_space(F, 0, 0));
    auto P1 = build_hodge(make_space(F, 0, 1));
    VecC x = random_vec(P0.space.dim, 3);
    VecC lhs = P1.green(P1.dbar_in.data * x), rhs = P1.dbar_in.data * P0.green(x);
    CHECK((lhs - rhs).norm() < 1e-10 * lhs.norm());
}

TEST_CASE("minimal solution recovers the coexact primitive") {
    auto F = flat_fiber(cd(0.3, 0.8), VecR::Zero(2));
    auto P0 = build_hodge(make_space(F, 0, 0));
    auto P1 = build_hodge(make_space(F, 0, 1));
    VecC g = random_vec(P0.space.dim, 4);
    g -= P0.project(g);
    FormSection alpha(P1.space, P1.dbar_in.data * g);
    auto u = minimal_solution(P1, alpha);
    CHECK((u.coeffs - g).norm() < 1e-8 * g.norm());
    double w = F->weight;
    double lhs = w * u.coeffs.squaredNorm(), rhs = (w * alpha.coeffs.dot(P1.green(alpha.coeffs))).real();
    CHECK(std::abs(lhs - rhs) < 1e-8 * rhs);
    CHECK(minimal_solution(P1, FormSection(P1.space)).coeffs.norm() == 0.0);
    FormSection h(P1.space, P1.harmonic_basis.col(0));
    CHECK_THROWS_AS(minimal_solution(P1, h), Error);
}

TEST_CASE("Bergman projection") {
    auto F = flat_fiber(cd(0.1, 1.3), VecR::Zero(2));
    auto P11 = build_hodge(make_space(F, 1, 1));
    auto P10 = build_hodge(make_space(F, 1, 0));
    FormSection f(P10.space, random_vec(P10.space.dim, 5));
    auto pf = bergman_project(P11, f);
    CHECK((bergman_project(P11, pf).coeffs - pf.coeffs).norm() < 1e-9 * f.norm());
    FormSection h(P10.space, P10.harmonic_basis.col(0));
    CHECK((bergman_project(P11, h).coeffs - h.coeffs).norm() < 1e-12);
    // coexact part is removed
    VecC beta = random_vec(P11.space.dim, 6);
    FormSection c(P10.space, SpMat(P11.dbar_in.data.adjoint()) * P11.green(beta));
    CHECK(bergman_project(P11, c).norm() < 1e-8 * c.norm());
}

TEST_CASE("first eigenvalue on the square torus") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    auto P = build_hodge(make_space(F, 0, 1));
    // |∂_z̄ e^{2πix}|² |dz̄|² = π²·2 on the square torus with ω = (i/2) dz∧dz̄
    CHECK(smallest_positive_eigenvalue(P) == doctest::Approx(2 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("rescaling the Kaehler form rescales the spectrum") {
    auto T = make_torus(cd(0, 1));
    MatC H = T.kaehler * 3.0;
    auto T3 = make_torus(1, T.period, H, false);
    auto P = build_hodge(make_space(make_fiber(T, make_flat_bundle(T, VecR::Zero(2)), Disc::spectral(6)), 0, 1));
    auto P3 = build_hodge(make_space(make_fiber(T3, make_flat_bundle(T3, VecR::Zero(2)), Disc::spectral(6)), 0, 1));
    CHECK(smallest_positive_eigenvalue(P3) == doctest::Approx(smallest_positive_eigenvalue(P) / 3.0).epsilon(1e-12));
}

TEST_CASE("grid engine on the degree-one bundle") {
    auto T = make_torus(cd(0, 1));
    auto F = make_fiber(T, make_positive_bundle(T, 1), Disc::grid(32, 8));
    auto P00 = build_hodge(make_space(F, 0, 0));
    auto P10 = build_hodge(make_space(F, 1, 0));
    CHECK(P00.harmonic_dim() == 1);
    CHECK(P10.harmonic_dim() == 1);
    VecC x = random_vec(P10.space.dim, 7);
    VecC r = x - P10.project(x) - P10.laplacian.data * P10.green(x);
    CHECK(r.norm() < 1e-9 * x.norm());
    // □ is positive semidefinite on the computed low spectrum
    CHECK(P10.eigenvalues.minCoeff() >= -1e-10 * P10.lambda_max);
    // Demailly–Skoda–Hörmander: ⟨Gα,α⟩ ≤ ⟨A⁻¹α,α⟩ with A = [iΘ,Λ] = 2π on smooth coexact (1,1)-forms
    auto P11 = build_hodge(make_space(F, 1, 1));
    for (const auto& s : smooth_test_sections(P11.space, 3, 11)) {
        VecC a = s.coeffs - P11.project(s.coeffs);
        double w = F->weight;
        double g = (w * a.dot(P11.green(a))).real(), bound = w * a.squaredNorm() / (2 * kPi);
        CHECK(g <= bound + 1e-6);
    }
}

TEST_CASE("spectral engine matches the closed-form spectrum") {
    VecR chi(2);
    chi << 0.25, 0.6;
    auto F = flat_fiber(cd(0.3, 0.8), chi);
    for (int q = 0; q <= 1; ++q) {
        auto P = build_hodge(make_space(F, 1, q));
        CHECK(spectrum_check(P).pass());
        CHECK(kernel_check(P).pass());
        CHECK(minimal_norm_check(build_hodge(make_space(F, 0, 1)), 3).pass());
    }
}
