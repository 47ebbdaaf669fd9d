#pragma once

#include "torlab/family.hpp"

namespace torlab {

// Matrices use M_ab = pair(X_b, X_a), so the Gram of a column family X is X^H W X.
struct CurvatureReport {
    cd t, sigma{1, 0}, tau{1, 0};
    int rank = 0;
    bool near_jump = false;
    MatC gram;
    MatC term_theta_h, term_kappa, term_sff;
    MatC theta_H, theta_H_bly;
    double nakano_min_eig = 0;
    double sff_min_eig = 0;
    double residual_routes = 0;  // relative
    double sff_routes = 0;       // max over the basis, relative to ‖f‖
    double hermitian_defect = 0;
    std::vector<double> res_a, res_b, res_c, admissibility, kernel_overlap;
};

struct SffResult {
    FormSection primary;  // P⊥ ι*L^{1,0}u
    FormSection green;    // −G∂̄*(ι*((ξ⌟Θ)u) + ∇^{1,0}((∂̄ξ)⌟u))
    double route_residual = 0;
    double lemma_residual = 0;  // ∂̄ of the restricted Lie derivative against its closed form
};

SffResult second_fundamental_form(const FiberContext& ctx, const HorizontalLift& lift, const RepresentativeSet& rep,
                                  double admissible_tol = 1e-4);

cd curvature_L_theta(const FiberContext& ctx, const HorizontalLift& lift, const FormSection& f1, const FormSection& f2,
                     cd sigma, cd tau);

CurvatureReport curvature_H(const FiberContext& ctx, const HorizontalLift& lift, cd sigma = 1.0, cd tau = 1.0);

double lift_independence_check(const FiberContext& ctx, const HorizontalLift& l1, const HorizontalLift& l2,
                               cd sigma = 1.0, cd tau = 1.0);

struct HRResult {
    cd lhs, rhs;
    double residual;
};
HRResult hodge_riemann_check(const FormSection& alpha, double tol = 1e-8);

// α = Σ_j ω^j ∧ α_j, returned by increasing j (index in the vector is j)
std::vector<FormSection> lefschetz_decompose(const FormSection& alpha);
FormSection lefschetz_power(const FormSection& a, int j);

struct XuWangResult {
    MatC lhs, rhs;
    double margin;  // min eig of lhs − rhs
};
XuWangResult xu_wang_bound(const FiberContext& ctx, const HorizontalLift& lift, cd sigma = 1.0);

}  // namespace torlab
