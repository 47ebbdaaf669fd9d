#pragma once

#include <string>

#include "torlab/hodge.hpp"

namespace torlab {

struct IdentityCheck {
    std::string name;
    int p = 0, q = 0;
    double residual = 0;  // relative to the size of the leading operand
    double tol = 0;
    bool pass() const { return residual <= tol; }
};

struct IdentityTolerances {
    double spectral = 1e-10;
    double grid_dbar2 = 1e-8;
    double grid = 1e-6;
    double decomposition = 1e-9;
};

// ∂̄² = 0, ∇^{1,0}² = 0, both Hodge identities, Bochner–Kodaira and [L,Λ] on every bidegree.
// Spectral fibers use exact operator norms; grid fibers use smooth test sections.
std::vector<IdentityCheck> identity_suite(const FiberPtr& F, const IdentityTolerances& tol = {});

// ‖x − ℘x − □Gx‖/‖x‖ on a seeded random vector of each bidegree
std::vector<IdentityCheck> decomposition_suite(const FiberPtr& F, const HodgeOptions& opt = {},
                                               const IdentityTolerances& tol = {});

// ‖u₀‖² against ⟨Gα,α⟩ and ‖∂̄u₀ − α‖ for α = ∂̄g with g random; pkg of bidegree (p,q), q ≥ 1
IdentityCheck minimal_norm_check(const HodgePackage& pkg, unsigned seed, double tol = 1e-8);
// spectral flat packages: eigenvalues against the closed form (relative to the largest), kernel count exactly
IdentityCheck spectrum_check(const HodgePackage& pkg, double tol = 1e-9);
IdentityCheck kernel_check(const HodgePackage& pkg);

// smooth test sections of a grid fiber: theta sections times degree-1 trigonometric factors
std::vector<FormSection> smooth_test_sections(const FormSpace& S, int count, unsigned seed);

}  // namespace torlab
