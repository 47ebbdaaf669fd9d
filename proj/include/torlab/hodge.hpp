#pragma once

#include <functional>
#include <memory>

#include "torlab/dolbeault.hpp"

namespace torlab {

struct HodgeOptions {
    double rank_tol = 1e-7;  // relative to the largest eigenvalue
    int block = 12;          // subspace size for the grid low spectrum
    int refine = 8;          // refinement sweeps for the grid Green solve
    unsigned seed = 7;
};

struct HodgeImpl;

struct HodgePackage {
    FormSpace space;
    OperatorMatrix dbar_out;  // ∂̄ : (p,q) -> (p,q+1), empty data at top degree
    OperatorMatrix dbar_in;   // ∂̄ : (p,q−1) -> (p,q), empty data at q = 0
    OperatorMatrix laplacian;
    OperatorMatrix laplacian10;
    MatC harmonic_basis;  // Euclidean-orthonormal coefficient columns
    VecR eigenvalues;     // ascending; complete for spectral, the computed low part for grid
    double lambda_max = 0;
    double rank_tol = 1e-7;
    double cut = 0;  // rank_tol * lambda_max
    bool complete_spectrum = false;
    std::shared_ptr<const HodgeImpl> impl;

    int harmonic_dim() const { return static_cast<int>(harmonic_basis.cols()); }
    VecC project(const VecC& x) const;  // ℘
    VecC green(const VecC& x) const;    // G, zero on the harmonic part
};

HodgePackage build_hodge(const FormSpace& S, const HodgeOptions& opt = {});

FormSection green(const HodgePackage& pkg, const FormSection& a);
FormSection harmonic_project(const HodgePackage& pkg, const FormSection& a);
// L2-orthonormal harmonic sections
std::vector<FormSection> harmonic_sections(const HodgePackage& pkg);

// u₀ = ∂̄*Gα for ∂̄-closed α orthogonal to the harmonic space
FormSection minimal_solution(const HodgePackage& pkg, const FormSection& alpha, double tol = 1e-6);

// P f = f − ∂̄*G∂̄f on (n,0); pkg_next is the package of (n,1)
FormSection bergman_project(const HodgePackage& pkg_next, const FormSection& f);
FormSection neumann_project(const HodgePackage& pkg_next, const FormSection& f);

double smallest_positive_eigenvalue(const HodgePackage& pkg);

}  // namespace torlab
