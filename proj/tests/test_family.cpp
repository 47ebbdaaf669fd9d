#include <random>

#include "doctest.h"
#include "torlab/curvature.hpp"

using namespace torlab;

namespace {

FamilySpec abelian_surface() { return siegel_family(cd(0, 1), cd(0.1, 0.05), cd(0.2, 1.3), cd(0.3, 0.1)); }

}  // namespace

TEST_CASE("Kodaira-Spencer representative of the trivialization lift") {
    cd t(0.2, 1.1);
    auto fam = elliptic_family(t, BundleKind::Flat, 0);
    auto ctx = make_context(fam, t, Disc::spectral(6));
    auto nu = ks_representative(ctx, trivialization_lift(ctx), cd(2, 1));
    // constant field (2+i)·(−1/(t−t̄))
    cd want = cd(2, 1) * (-1.0 / (t - std::conj(t)));
    const auto& U = *ctx.ufiber;
    CHECK(std::abs(nu.B[0][0](U.mode_index({0, 0})) - want) < 1e-14);
    CHECK(std::abs(nu.B[0][0].norm() - std::abs(want)) < 1e-14);
}

TEST_CASE("primitive lift on an abelian surface") {
    auto fam = abelian_surface();
    auto ctx = make_context(fam, fam.t, default_disc(fam));
    std::mt19937 rng(7);
    auto base = trivialization_lift(ctx, {random_trig(2, 1, 0.2, rng), random_trig(2, 1, 0.2, rng)});
    CHECK(primitivity_residual(ctx, base) > 1e-3);
    auto pl = primitive_lift(ctx, base);
    CHECK(pl.kind == LiftKind::Primitive);
    CHECK(primitivity_residual(ctx, pl) <= 1e-8);
    for (const auto& f : ctx.basis) {
        auto hr = hodge_riemann_check(kappa(ctx, pl, f, 1.0));
        CHECK(hr.residual <= 1e-7);
        // κf is a primitive (1,1)-form, so the pairing is −‖κf‖² < 0
        CHECK(hr.rhs.real() < 0);
    }
}

TEST_CASE("primitive lift is the identity in dimension one") {
    auto fam = elliptic_family(cd(0, 1), BundleKind::Flat, 0);
    auto ctx = make_context(fam, fam.t, default_disc(fam));
    std::mt19937 rng(3);
    auto base = trivialization_lift(ctx, {random_trig(1, 2, 0.3, rng)});
    auto pl = primitive_lift(ctx, base);
    CHECK(pl.kind == base.kind);
    CHECK(pl.eta.size() == base.eta.size());
    CHECK(pl.pert.size() == base.pert.size());
}

TEST_CASE("Berndtsson representatives on the degree-one bundle") {
    cd t(0.2, 1.1);
    auto fam = elliptic_family(t, BundleKind::Positive, 1);
    auto ctx = make_context(fam, t, Disc::grid(32, 8));
    std::mt19937 rng(5);
    for (auto lift : {trivialization_lift(ctx), trivialization_lift(ctx, {random_trig(1, 2, 0.3, rng)})}) {
        auto rep = berndtsson_representative(ctx, lift, ctx.basis[0]);
        CHECK(rep.res_a <= 1e-6);
        CHECK(rep.res_b <= 1e-6);
        CHECK(rep.res_c <= 1e-6);
        CHECK(rep.admissibility <= 1e-4);
        // derivative of the Gram of the extension against the Lie derivatives
        auto pr = lie_product_rule_check(ctx, rep);
        CHECK(std::abs(pr.first - pr.second) <= 1e-6 * std::max(1.0, std::abs(pr.second)));
    }
}
