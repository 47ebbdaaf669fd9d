#pragma once

#include <memory>

#include "torlab/exterior.hpp"
#include "torlab/torus.hpp"

namespace torlab {

enum class DiscKind { Spectral, Grid };

struct Disc {
    DiscKind kind = DiscKind::Spectral;
    int size = 8;   // mode cutoff M, or points per direction N
    int order = 4;  // finite-difference order, grid only
    static Disc spectral(int M) { return {DiscKind::Spectral, M, 4}; }
    static Disc grid(int N, int order = 4) { return {DiscKind::Grid, N, order}; }
};

// Everything shared by the forms on one fiber: geometry, bundle, basis enumeration
// and the scalar first-order operators of the orthonormal frame.
struct Fiber {
    LatticeTorus torus;
    BundleData bundle;
    Disc disc;
    ExtAlg alg;
    int n = 1;
    int K = 0;            // modes or grid points
    double weight = 1.0;  // quadrature weight of one basis function (volume is 1)
    int stencil = 4;      // finite-difference order, grid only

    // spectral: integer mode labels (k_1..k_n, l_1..l_n) per index
    std::vector<std::vector<int>> modes;
    // grid: coordinates of the points
    std::vector<double> xs, ys;

    // coordinate derivatives ∂_{z̄_a} including the bundle connection (twisted)
    std::vector<SpMat> dzbar;
    // orthonormal frame: dbar_w[j] = ∂_{w̄_j}, d_w[j] = −dbar_w[j]^H
    std::vector<SpMat> dbar_w, d_w;
    // curvature coefficients in the orthonormal frame, Θ = Σ th_ab e_a ∧ ē_b (pointwise values)
    std::vector<std::vector<VecC>> theta;
    bool curved = false;

    explicit Fiber(int n_) : alg(n_), n(n_) {}

    int mode_index(const std::vector<int>& kl) const;  // −1 if outside the cutoff
};

using FiberPtr = std::shared_ptr<const Fiber>;

FiberPtr make_fiber(const LatticeTorus& T, const BundleData& B, Disc disc);
// same torus and discretization, trivial bundle; used for scalar fields and vector fields
FiberPtr untwisted(const FiberPtr& F);

struct FormSpace {
    FiberPtr fiber;
    int p = 0, q = 0;
    int ncomp = 0;
    int dim = 0;
    int K() const { return fiber->K; }
    int n() const { return fiber->n; }
    const std::vector<unsigned>& comps() const { return fiber->alg.comps(p, q); }
    bool same(const FormSpace& o) const { return fiber == o.fiber && p == o.p && q == o.q; }
};

FormSpace make_space(const FiberPtr& F, int p, int q);
FormSpace make_space(const LatticeTorus& T, const BundleData& B, int p, int q, Disc disc);

struct FormSection {
    FormSpace space;
    VecC coeffs;
    FormSection() = default;
    FormSection(const FormSpace& s) : space(s), coeffs(VecC::Zero(s.dim)) {}
    FormSection(const FormSpace& s, VecC c);
    double norm() const;
};

struct OperatorMatrix {
    FormSpace dom, cod;
    SpMat data;
    FormSection apply(const FormSection& u) const;
};

OperatorMatrix assemble_dbar(const FormSpace& S);
OperatorMatrix assemble_nabla10(const FormSpace& S);
OperatorMatrix adjoint(const OperatorMatrix& A);
// general Gram matrices given as positive diagonal weights
OperatorMatrix adjoint(const OperatorMatrix& A, const VecR& gram_dom, const VecR& gram_cod);
OperatorMatrix lefschetz_L(const FormSpace& S);
OperatorMatrix lefschetz_Lambda(const FormSpace& S);
OperatorMatrix curvature_action(const FormSpace& S);
OperatorMatrix identity_op(const FormSpace& S);

// i [Θ, Λ] acting on (p,q)
SpMat bk_curvature_term(const FormSpace& S);

// L2 pairing with the pointwise metric of (ω, h)
cd pair_l2(const FormSection& u, const FormSection& v);
// √−1^{n²} ∫ u ∧ conj(v) divided by dV, for p+q = n; for (n,0) this equals pair_l2
cd hr_pair(const FormSection& u, const FormSection& v);

// scalar field multiplication: field given in the untwisted basis of the same
// discretization (grid values, or Fourier coefficients)
SpMat mult_field(const FiberPtr& F, const VecC& field);
VecC field_from_trig(const FiberPtr& F, const TrigField& f);

// pointwise wedge α ∧ β where α is an untwisted scalar form given by per-component fields
FormSection wedge_scalar_form(const FormSpace& alpha_space, const std::vector<VecC>& alpha,
                              const FormSection& beta);

// vertical (1,0) vector field, coordinate components v^{z_a} as untwisted fields
struct VerticalVectorField {
    FiberPtr fiber;  // untwisted
    std::vector<VecC> comp;
};

// a vector-valued (0,1)-form Σ B_ac dz̄_c ⊗ ∂_{z_a}, entries as untwisted fields
struct VectorValued01 {
    FiberPtr fiber;
    int n = 1;
    std::vector<std::vector<VecC>> B;  // B[a][c]
};

// (ν ⊗ ∂_a) ⌟ u = ν ∧ (∂_a ⌟ u), summed
FormSection contract(const VectorValued01& nu, const FormSection& u);
// v ⌟ u for a vertical vector field
FormSection contract(const VerticalVectorField& v, const FormSection& u);

// operator norm; exact per-block for mode-diagonal spectral operators, power iteration otherwise
double op_norm(const SpMat& A, const Fiber& F, int rows_comp, int cols_comp);
double op_norm(const OperatorMatrix& A);
double power_norm(const SpMat& A, int iters = 200);

// matrix-market style dump (debugging)
void dump_matrix_market(const SpMat& A, const std::string& path);

}  // namespace torlab
