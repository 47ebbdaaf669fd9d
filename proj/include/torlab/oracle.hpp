#pragma once

#include "torlab/family.hpp"

namespace torlab {

// Jacobi theta sections of the degree-d bundle in the unitary trivialization gauge,
// g_j = Σ_{m ∈ j/d + Z} exp(πi d t (m+y)² + 2πi d x m), sampled on the fiber grid.
// d = 0 gives the constant section.
struct ThetaFrame {
    cd t;
    int d = 0;
    std::vector<VecC> g;  // coordinate coefficients of g_j dz
};

ThetaFrame theta_frame(cd t, int d, const Fiber& grid);
// ‖∂̄ g‖ / ‖g‖ per section with the discrete operator of the fiber
std::vector<double> theta_dbar_residual(const ThetaFrame& th, const Fiber& F);
// Gram of the frame as (1,0)-forms, entry (k,j) = (s_j, s_k)
MatC theta_gram(const ThetaFrame& th, const Fiber& F);

// Chern curvature of ℋ from the frame Gram on a 3×3 stencil in t, expressed in the
// orthonormal basis of ctx (same convention as CurvatureReport::theta_H with σ=τ=1)
MatC fd_chern_curvature_H(const FiberContext& ctx, double step = 1e-3);

struct ScanRow {
    cd t;
    int rank = 0;         // engine kernel count
    int rank_exact = 0;   // closed-form count
    double lambda1 = 0;   // smallest positive eigenvalue of the engine
};
std::vector<ScanRow> rank_scan(const FamilySpec& fam, const std::vector<cd>& ts, Disc disc = Disc::spectral(8),
                               const HodgeOptions& opt = {});

// closed-form eigenvalues of □ on flat (p,q)-forms, sorted, each with multiplicity C(n,p)C(n,q)
VecR exact_flat_spectrum(const LatticeTorus& T, const VecR& chi, int p, int q, int M);

// kernel count from a sorted spectrum: values below rank_tol·max separated by a gap ratio
int kernel_count(const VecR& sorted_eigs, double rank_tol = 1e-7, double gap = 1e4);

}  // namespace torlab
