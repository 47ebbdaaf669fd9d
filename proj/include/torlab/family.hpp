#pragma once

#include <random>

#include "torlab/hodge.hpp"

namespace torlab {

// Fiber at one base point together with the Hodge packages the t-calculus needs.
struct FiberContext {
    FamilySpec family;
    cd t;
    FiberPtr fiber;   // twisted, forms live here
    FiberPtr ufiber;  // untwisted, scalar and vector fields live here
    std::vector<HodgePackage> pkg;  // indexed by p*(n+1)+q, only those built
    std::vector<bool> have;
    std::vector<FormSection> basis;  // L2-orthonormal harmonic (n,0)-forms

    const HodgePackage& at(int p, int q) const;
    bool has(int p, int q) const;
    int n() const { return fiber->n; }
};

FiberContext make_context(const FamilySpec& fam, cd t, Disc disc, const HodgeOptions& opt = {});
Disc default_disc(const FamilySpec& fam);

enum class LiftKind { Trivialization, Primitive };

// ξ = τ(∂_t + Σ (Ω'(Ω−Ω̄)^{-1}... ) trivialization direction) + τ·(pert − η) vertical part.
// Vertical parts are per unit τ, in z-coordinate components.
struct HorizontalLift {
    LiftKind kind = LiftKind::Trivialization;
    FiberPtr ufiber;
    std::vector<TrigField> pert;  // smooth vertical perturbation v_a (exact derivatives)
    std::vector<VecC> eta;        // correction fields of the primitive lift (on ufiber)
    bool has_vertical() const { return !pert.empty() || !eta.empty(); }
};

HorizontalLift trivialization_lift(const FiberContext& ctx, std::vector<TrigField> pert = {});
// random real trigonometric field with modes |k|,|l| <= maxmode and sup-size about amp
TrigField random_trig(int n, int maxmode, double amp, std::mt19937& rng);

// coefficient matrix A of the constant part: ∂̄ξ₀ = Σ A_ac dz̄_c ⊗ ∂_{z_a}
MatC ks_constant(const FamilySpec& fam, cd t);
VectorValued01 ks_representative(const FiberContext& ctx, const HorizontalLift& lift, cd tau);
// vertical field values v_a and their ∂_{z̄_c} derivatives on ufiber
std::vector<VecC> vertical_values(const FiberContext& ctx, const HorizontalLift& lift);
std::vector<std::vector<VecC>> vertical_dzbar(const FiberContext& ctx, const HorizontalLift& lift);

FormSection kappa(const FiberContext& ctx, const HorizontalLift& lift, const FormSection& f, cd tau);

// n=2: θ = θ₀ − η with η the ω-sharp of ∂̄*G((∂̄ξ)⌟ω); n=1 returns the base lift
HorizontalLift primitive_lift(const FiberContext& ctx, const HorizontalLift& base);
// max over the basis of ‖ω ∧ κf‖ / ‖f‖
double primitivity_residual(const FiberContext& ctx, const HorizontalLift& lift);

// n=1 data of the extension u = s ϑ + V dt in the trivialization gauge, with
// coordinate coefficients g₀ (the fiber form), g₁ = ∂_t g, g₂ = ∂_t̄ g.
struct RepresentativeSet {
    FormSection f;           // (1,0)
    VecC g0, g1, g2, V;      // coordinate coefficients; V a section
    FormSection kappa;       // κf, (0,1)
    FormSection xi_dbar_u;   // ι*(ξ⌟∂̄u), (0,1)
    FormSection xi_nabla_u;  // ι*(ξ⌟∇^{1,0}u), (1,0)
    FormSection lie10;       // ι*L^{1,0}_ξ u, (1,0)
    FormSection lie01;       // ι*L^{0,1}_ξ̄ u, (1,0)
    double admissibility = 0;   // ‖ι*L^{1,0}∂̄u‖ relative
    double kernel_overlap = 0;  // part of the source of g₁ lost to the numerical (1,1) kernel
    double res_a = 0, res_b = 0, res_c = 0;
    bool primitive_ok = false, orthogonality_ok = false;
};

// per unit τ; g2 is an optional anti-holomorphic extension datum (coordinate coefficients)
RepresentativeSet berndtsson_representative(const FiberContext& ctx, const HorizontalLift& lift,
                                            const FormSection& f, const VecC* g2 = nullptr,
                                            double tol = 1e-6);

// ∂_t of the Gram of the extension by central differences in t, against
// pair(L^{1,0}u,u) + pair(u,L^{0,1}u); returns (fd, analytic)
std::pair<cd, cd> lie_product_rule_check(const FiberContext& ctx, const RepresentativeSet& rep, double step = 1e-4);

// ι*L^{1,0}∂̄u coefficient field (coordinate), used for the admissibility test
VecC lie10_dbar_u(const FiberContext& ctx, const HorizontalLift& lift, const RepresentativeSet& rep);

// helpers shared with the curvature module (n=1)
struct N1Ops {
    SpMat Dbar, D;  // coordinate operators ∂_z̄, ∂_z on sections (twisted)
    double Y = 1, C = 1, H = 1;
    cd t, c;        // c = Ω'/(Ω−Ω̄)
    VecC theta_c;   // Θ_zz̄ coordinate values (grid) or zero
    double weight = 1;
};
N1Ops n1_ops(const FiberContext& ctx);

}  // namespace torlab
