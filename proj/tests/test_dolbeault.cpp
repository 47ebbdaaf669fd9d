#include <random>

#include "doctest.h"
#include "torlab/dolbeault.hpp"

using namespace torlab;

namespace {

FiberPtr flat_fiber(cd t, VecR chi, int M = 8) {
    auto T = make_torus(t);
    return make_fiber(T, make_flat_bundle(T, chi), Disc::spectral(M));
}

FiberPtr positive_fiber(cd t, int d, int N, int order = 8) {
    auto T = make_torus(t);
    return make_fiber(T, make_positive_bundle(T, d), Disc::grid(N, order));
}

VecC random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    VecC x(n);
    for (int i = 0; i < n; ++i) x(i) = cd(nd(rng), nd(rng));
    return x;
}

}  // namespace

TEST_CASE("space dimensions") {
    CHECK(make_space(flat_fiber(cd(0, 1), VecR::Zero(2)), 0, 0).dim == 289);
    MatC Om(2, 2);
    Om << cd(0, 1), 0, 0, cd(0, 1);
    auto T2 = make_torus(2, Om);
    auto F2 = make_fiber(T2, make_flat_bundle(T2, VecR::Zero(4)), Disc::spectral(4));
    CHECK(make_space(F2, 1, 1).dim == 4 * 6561);
    CHECK(make_space(positive_fiber(cd(0, 1), 1, 32, 4), 0, 1).dim == 1024);
}

TEST_CASE("backend must match the bundle") {
    auto T = make_torus(cd(0, 1));
    CHECK_THROWS_AS(make_fiber(T, make_flat_bundle(T, VecR::Zero(2)), Disc::grid(16)), Error);
    CHECK_THROWS_AS(make_fiber(T, make_positive_bundle(T, 1), Disc::spectral(4)), Error);
}

TEST_CASE("dbar kills constants and leaves the top degree") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    auto S = make_space(F, 0, 0);
    FormSection one(S);
    one.coeffs(F->mode_index({0, 0})) = 1.0;
    CHECK(assemble_dbar(S).apply(one).norm() == 0.0);
    CHECK_THROWS_AS(assemble_dbar(make_space(F, 0, 1)), Error);
    CHECK_THROWS_AS(assemble_nabla10(make_space(F, 1, 0)), Error);
    CHECK_THROWS_AS(lefschetz_Lambda(make_space(F, 0, 1)), Error);
}

TEST_CASE("smallest singular value of dbar for a half-integer character") {
    cd t(0.3, 1.2);
    VecR chi(2);
    chi << 0.5, 0.0;
    auto F = flat_fiber(t, chi);
    auto D = assemble_dbar(make_space(F, 0, 0));
    Eigen::JacobiSVD<MatC> svd{MatC(D.data)};
    double smin = svd.singularValues().minCoeff();
    // ∂_z̄ e^{2πi(kx+ly)} = 2πi (t k − l)/(t − t̄), and |dz̄| = √(2Y) for ω = (i/2Y) dz∧dz̄
    double Y = t.imag(), best = 1e300;
    for (int k = -8; k <= 8; ++k)
        for (int l = -8; l <= 8; ++l) {
            cd mu = 2.0 * kPi * kI * (t * (k + 0.5) - double(l)) / (t - std::conj(t));
            best = std::min(best, std::abs(mu) * std::sqrt(2 * Y));
        }
    CHECK(smin == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("adjoint is an involution and matches the pairing") {
    auto F = flat_fiber(cd(0.2, 0.9), VecR::Zero(2));
    auto A = assemble_dbar(make_space(F, 1, 0));
    auto AA = adjoint(adjoint(A));
    CHECK((AA.data - A.data).norm() == 0.0);
    FormSection x(A.dom, random_vec(A.dom.dim, 1)), y(A.cod, random_vec(A.cod.dim, 2));
    cd lhs = pair_l2(A.apply(x), y), rhs = pair_l2(x, adjoint(A).apply(y));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
    auto Z = OperatorMatrix{A.dom, A.cod, SpMat(A.cod.dim, A.dom.dim)};
    CHECK(adjoint(Z).data.nonZeros() == 0);
}

TEST_CASE("pairing normalization and signs") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    auto S = make_space(F, 0, 0);
    FormSection one(S);
    one.coeffs(F->mode_index({0, 0})) = 1.0;
    CHECK(pair_l2(one, one).real() == doctest::Approx(1.0));
    FormSection e(S);
    e.coeffs(F->mode_index({1, 0})) = 1.0;
    CHECK(std::abs(pair_l2(one, e)) == 0.0);
    auto G = positive_fiber(cd(0, 1), 1, 16, 4);
    FormSection g1(make_space(G, 0, 0), VecC::Ones(G->K));
    CHECK(pair_l2(g1, g1).real() == doctest::Approx(1.0));
    // the (n,0) pairing is positive for n = 1 and n = 2
    FormSection u(make_space(F, 1, 0), random_vec(F->K, 3));
    CHECK(hr_pair(u, u).real() > 0);
    CHECK(std::abs(hr_pair(u, u) - pair_l2(u, u)) < 1e-12 * pair_l2(u, u).real());
    MatC Om(2, 2);
    Om << cd(0, 1), cd(0.1, 0.05), cd(0.1, 0.05), cd(0.2, 1.3);
    auto T2 = make_torus(2, Om);
    auto F2 = make_fiber(T2, make_flat_bundle(T2, VecR::Zero(4)), Disc::spectral(2));
    FormSection u2(make_space(F2, 2, 0), random_vec(F2->K, 4));
    CHECK(hr_pair(u2, u2).real() > 0);
    CHECK(std::abs(hr_pair(u2, u2) - pair_l2(u2, u2)) < 1e-12 * pair_l2(u2, u2).real());
    FormSection v(make_space(F, 0, 1), random_vec(F->K, 5));
    cd a = pair_l2(u, u), b = pair_l2(FormSection(u.space, v.coeffs), u);
    CHECK(std::abs(b - std::conj(pair_l2(u, FormSection(u.space, v.coeffs)))) < 1e-12 * a.real());
}

TEST_CASE("Lefschetz commutator acts by p+q-n") {
    MatC Om(2, 2);
    Om << cd(0, 1), 0, 0, cd(0, 1);
    auto T2 = make_torus(2, Om);
    auto F2 = make_fiber(T2, make_flat_bundle(T2, VecR::Zero(4)), Disc::spectral(1));
    auto F1 = flat_fiber(cd(0, 1), VecR::Zero(2), 2);
    auto comm = [](const FiberPtr& F, int p, int q) {
        auto S = make_space(F, p, q);
        int n = F->n;
        SpMat out(S.dim, S.dim);
        if (p >= 1 && q >= 1) out += lefschetz_L(make_space(F, p - 1, q - 1)).data * lefschetz_Lambda(S).data;
        if (p + 1 <= n && q + 1 <= n) out -= lefschetz_Lambda(make_space(F, p + 1, q + 1)).data * lefschetz_L(S).data;
        return MatC(out);
    };
    auto is_mult = [](const MatC& M, double c) { return (M - c * MatC::Identity(M.rows(), M.cols())).norm() < 1e-12; };
    CHECK(is_mult(comm(F2, 1, 1), 0.0));
    CHECK(is_mult(comm(F2, 0, 0), -2.0));
    CHECK(is_mult(comm(F1, 1, 1), 1.0));
    CHECK(is_mult(comm(F2, 2, 1), 1.0));
}

TEST_CASE("curvature action") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    CHECK(curvature_action(make_space(F, 0, 0)).data.nonZeros() == 0);
    // [iΘ,Λ] on (1,1) is 2πd times the identity for the constant-curvature metric of unit volume
    for (int d : {1, 3}) {
        auto G = positive_fiber(cd(0, 1), d, 64);
        auto S = make_space(G, 1, 1);
        MatC B = MatC(bk_curvature_term(S));
        CHECK((B - 2 * kPi * d * MatC::Identity(S.dim, S.dim)).norm() / std::sqrt(double(S.dim)) < 1e-8 * 2 * kPi * d);
    }
}

TEST_CASE("contractions") {
    auto F = flat_fiber(cd(0, 1), VecR::Zero(2));
    auto U = untwisted(F);
    FormSection dz(make_space(F, 1, 0));
    dz.coeffs(F->mode_index({0, 0})) = 1.0;
    VectorValued01 nu;
    nu.fiber = U;
    nu.n = 1;
    VecC c = VecC::Zero(U->K);
    c(U->mode_index({0, 0})) = cd(0.3, -0.2);
    nu.B = {{c}};
    auto r = contract(nu, dz);
    CHECK(r.space.p == 0);
    CHECK(r.space.q == 1);
    // only the constant mode survives
    CHECK(std::abs(r.coeffs(F->mode_index({0, 0}))) > 0);
    CHECK((r.coeffs.norm() - std::abs(r.coeffs(F->mode_index({0, 0})))) < 1e-15);
    VerticalVectorField v{U, {VecC::Zero(U->K)}};
    CHECK(contract(v, dz).coeffs.norm() == 0.0);
    CHECK_THROWS_AS(contract(v, FormSection(make_space(F, 0, 1))), Error);
}
