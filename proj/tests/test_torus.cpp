#include "doctest.h"
#include "torlab/family.hpp"

using namespace torlab;

TEST_CASE("default Kaehler form has unit volume") {
    for (cd t : {cd(0, 1), cd(0.3, 1.7), cd(-0.4, 0.6)}) {
        auto T = make_torus(t);
        CHECK(T.volume() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(T.kaehler(0, 0).real() == doctest::Approx(0.5 / t.imag()).epsilon(1e-14));
        // H = C^T conj(C)
        MatC H = T.C.transpose() * T.C.conjugate();
        CHECK((H - T.kaehler).norm() < 1e-14);
    }
    MatC Om(2, 2);
    Om << cd(0, 1), cd(0.1, 0.05), cd(0.1, 0.05), cd(0.2, 1.3);
    auto T2 = make_torus(2, Om);
    CHECK(T2.volume() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((T2.C.transpose() * T2.C.conjugate() - T2.kaehler).norm() < 1e-13);
}

TEST_CASE("period must lie in the upper half plane") {
    CHECK_THROWS_AS(make_torus(cd(1, -1)), Error);
    try {
        make_torus(cd(0.5, 0));
    } catch (const Error& e) {
        CHECK(e.code() == Err::NonPositivePeriod);
    }
}

TEST_CASE("trigonometric fields differentiate like functions of z") {
    cd t(0.3, 1.2);
    auto T = make_torus(t);
    TrigField f = real_trig(1, {{1, 0}, {0, 1}, {2, -1}}, {0.4, -0.3, 0.2}, {0.1, 0.5, -0.7});
    TrigField fz = f.dzbar(T, 0), fw = f.dz(T, 0);
    // z = x + t y, so ∂_x = ∂_z + ∂_z̄ and ∂_y = t ∂_z + t̄ ∂_z̄
    double x = 0.27, y = 0.61, h = 1e-5;
    auto ev = [&](double a, double b) { return f.eval(&a, &b); };
    cd fx = (ev(x + h, y) - ev(x - h, y)) / (2 * h), fy = (ev(x, y + h) - ev(x, y - h)) / (2 * h);
    cd dzb = (t * fx - fy) / (t - std::conj(t));
    cd dz = (fy - std::conj(t) * fx) / (t - std::conj(t));
    CHECK(std::abs(fz.eval(&x, &y) - dzb) < 1e-7);
    CHECK(std::abs(fw.eval(&x, &y) - dz) < 1e-7);
}

TEST_CASE("Kodaira-Spencer constant of the elliptic family") {
    cd t(0.3, 1.2);
    auto fam = elliptic_family(t, BundleKind::Flat, 0);
    CHECK(std::abs(ks_constant(fam, t)(0, 0) - (-1.0 / (t - std::conj(t)))) < 1e-15);
    auto cf = constant_family(t, cd(0.1, 0.9), BundleKind::Flat, 0);
    CHECK(ks_constant(cf, t).norm() == 0.0);
}

TEST_CASE("jump locus membership") {
    CHECK(on_jump_locus(cd(0, 1)));
    CHECK(on_jump_locus(cd(1, 1)));     // i = −1 + (1+i)
    CHECK(on_jump_locus(cd(0, 0.5)));   // i = 2·(i/2)
    CHECK_FALSE(on_jump_locus(cd(0.37, 1)));
    CHECK_FALSE(on_jump_locus(cd(0.01, 1)));
    // on the locus the character is trivial
    CHECK(jumping_character(cd(0, 1)).norm() < 1e-12);
    CHECK(jumping_character(cd(0.2, 1)).norm() > 1e-3);
}

TEST_CASE("positive bundle curvature is constant without perturbation") {
    auto T = make_torus(cd(0.2, 1.1));
    for (int d = 1; d <= 3; ++d) {
        auto B = make_positive_bundle(T, d);
        double k0 = positive_curvature_at(T, B, 0.1, 0.2);
        CHECK(k0 == doctest::Approx(positive_curvature_at(T, B, 0.7, 0.9)).epsilon(1e-14));
        // degree = (1/2π)∫ iΘ_zz̄ dz∧dz̄, and ∫ i dz∧dz̄ = 2Y over a fundamental domain
        CHECK(k0 * 2 * T.Y(0, 0) / (2 * kPi) == doctest::Approx(double(d)).epsilon(1e-12));
    }
}
