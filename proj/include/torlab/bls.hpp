#pragma once

#include <functional>
#include <random>
#include <string>

#include "torlab/common.hpp"

namespace torlab {

// Finite-dimensional field over a disc of the base: a metric h(t) on C^N and a
// holomorphic frame V(t) (N × r) spanning the subfield; Π(t) is the h-orthogonal
// projector onto its span.
struct FiniteBLSField {
    int ambient_dim = 2;
    std::function<MatC(cd)> metric;
    std::function<MatC(cd)> frame;  // empty: subfield = whole fiber
    double sample_step = 1e-3;

    MatC projector(cd t) const;
};

// Θ_{tt̄} as an endomorphism: K = −∂_t̄(h⁻¹∂_t h), so that ⟨Θ a, b⟩_h = b^H h K a
MatC chern_curvature_fd(const std::function<MatC(cd)>& h, cd t, double step);
inline MatC chern_curvature_fd(const FiniteBLSField& F, cd t, double step) {
    return chern_curvature_fd(F.metric, t, step);
}

struct GaussGriffithsResult {
    MatC theta_L_on_H;  // ⟨Θ^ℒ V_j, V_k⟩
    MatC theta_H;       // ⟨Θ^ℋ V_j, V_k⟩ from the frame Gram
    MatC sff;           // ⟨II V_j, II V_k⟩
    double residual;
};
GaussGriffithsResult gauss_griffiths_check(const FiniteBLSField& F, cd t, double step);

// ‖hK − (hK)^H‖, which vanishes for the Chern curvature ((1,1) and h-anti-Hermitian as a form)
double curvature_hermitian_defect(const FiniteBLSField& F, cd t, double step);
// FD derivative of h(f₁,f₂) against h(∇f₁,f₂) + h(f₁,∇̄f₂) for constant sections
double metric_compatibility_defect(const FiniteBLSField& F, cd t, double step, std::mt19937& rng);

struct HermitianFormOnTensor {
    int m1 = 1, m2 = 0, r = 1;  // M = M₁ ⊕ M₂, F of dimension r
    MatC Phi;                    // on M ⊗ F, index i*r + a
    MatC phi;                    // fiber metric on F
};

struct PositivityResult {
    bool is_k_positive = false;
    double min_value = 0;  // minimum of the Schur-complement form over unit rank-≤k tensors
    MatC schur;
    VecC witness;          // minimizer (unit in the metric of M₁ ⊗ F)
};

MatC schur_complement(const HermitianFormOnTensor& A);
// alternating minimization over rank-≤k tensors with restarts
PositivityResult schur_complement_demailly(const HermitianFormOnTensor& A, int k, std::mt19937& rng,
                                           int restarts = 50);
// exhaustive oracle for small tensor spaces (m₁·r ≤ 9): scans the Grassmannian of the smaller factor
double rank_k_min_bruteforce(const MatC& S, int m, int r, int k);

// random instance generators
HermitianFormOnTensor random_nakano_positive(int m1, int m2, int r, double eps, std::mt19937& rng);
HermitianFormOnTensor random_indefinite(int m1, int m2, int r, std::mt19937& rng);
// Id − λ|ψ⟩⟨ψ| on C²⊗C² with ψ antisymmetric: Griffiths-positive, not Nakano for 1 < λ < 2
HermitianFormOnTensor griffiths_not_nakano(double lambda = 1.5);

// one seeded battery instance: ALS verdict against the brute-force oracle on the Schur complement
struct DemaillyCase {
    std::string kind;  // nakano-positive | indefinite | shifted | griffiths-not-nakano
    int m1 = 0, m2 = 0, r = 0, k = 1;
    double als_min = 0, oracle_min = 0;
    bool als_positive = false, oracle_positive = false;
    bool agree() const { return als_positive == oracle_positive; }
};
DemaillyCase run_demailly_case(const std::string& kind, const HermitianFormOnTensor& A, int k, std::mt19937& rng,
                               int restarts = 50);
// count instances with m₁·r ≤ 9 cycling through shapes, kinds and k
std::vector<DemaillyCase> demailly_battery(int count, std::mt19937& rng, int restarts = 50);

// catalog fields
FiniteBLSField field_identity(int N);
FiniteBLSField field_exp_scalar(int N, double a = 1.0);                   // e^{a|t|²} Id
FiniteBLSField field_exp_diag(double a, double b);                        // diag(e^{a|t|²}, e^{b|t|²})
FiniteBLSField field_rotating_line(double a = 0.7, double b = 0.3);       // span (1, a t + b t²) in (C², e^{|t|²})
FiniteBLSField field_random(int N, int rank, std::mt19937& rng);          // smooth random metric and frame

}  // namespace torlab
