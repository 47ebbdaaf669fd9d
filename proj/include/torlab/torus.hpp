#pragma once

#include <functional>
#include <optional>

#include "torlab/common.hpp"

namespace torlab {

struct LatticeTorus {
    int n = 1;
    MatC period;   // Ω, lattice Z^n + Ω Z^n
    MatC kaehler;  // H, ω = i Σ H_jk dz_j ∧ dz̄_k
    MatR Y, Yinv;  // Im Ω and its inverse
    MatC C, Cinv;  // orthonormal coframe e = C dz, H = C^T conj(C)
    double raw_volume = 1.0;  // volume before normalization

    double volume() const;  // ∫ ω^n/n!
};

// default kaehler is ½ Y^{-1}, which already has unit volume
LatticeTorus make_torus(int n, const MatC& Omega, std::optional<MatC> kaehler = std::nullopt,
                        bool normalize = true);
inline LatticeTorus make_torus(cd t) { return make_torus(1, MatC::Constant(1, 1, t)); }

// Finite Fourier sum Σ c e^{2πi(k·x + l·y)} with integer k, l; used for metric
// weight perturbations and smooth vertical vector fields.
struct TrigTerm {
    std::vector<int> k, l;
    cd c;
};
struct TrigField {
    int n = 1;
    std::vector<TrigTerm> terms;

    bool empty() const { return terms.empty(); }
    cd eval(const double* x, const double* y) const;
    // coordinate derivatives on the torus with period Ω
    TrigField dzbar(const LatticeTorus& T, int a) const;
    TrigField dz(const LatticeTorus& T, int a) const;
    TrigField conj() const;
    TrigField scaled(cd s) const;
    int max_mode() const;
};
// real field a cos + b sin per mode
TrigField real_trig(int n, const std::vector<std::vector<int>>& kl, const std::vector<double>& a,
                    const std::vector<double>& b);

enum class BundleKind { Flat, Positive };

struct BundleData {
    BundleKind kind = BundleKind::Flat;
    VecR chi;        // flat character (a_1..a_n, b_1..b_n) for the x and y lattice directions
    int degree = 0;  // positive kind
    TrigField psi;   // optional periodic perturbation of the metric weight
    MatC curvature;  // constant part of Θ(h) in dz_j ∧ dz̄_k coefficients

    bool flat() const { return kind == BundleKind::Flat; }
};

BundleData make_flat_bundle(const LatticeTorus& T, const VecR& chi);
BundleData make_positive_bundle(const LatticeTorus& T, int d, const TrigField& psi = {});

// Θ_{zz̄} of the positive bundle at a point, n=1
double positive_curvature_at(const LatticeTorus& T, const BundleData& B, double x, double y);

struct FamilySpec {
    std::string id;
    int n = 1;
    cd t{0, 1};
    cd tau{1, 0};
    std::function<MatC(cd)> period;
    std::function<MatC(cd)> dperiod;  // holomorphic derivative of Ω
    BundleKind kind = BundleKind::Flat;
    int degree = 0;
    std::function<VecR(cd)> character;  // flat kind

    LatticeTorus torus_at(cd s) const { return make_torus(n, period(s)); }
    BundleData bundle_at(cd s) const;
};

FamilySpec elliptic_family(cd t, BundleKind kind, int degree, const VecR& chi = VecR::Zero(2));
FamilySpec constant_family(cd t, cd omega0, BundleKind kind, int degree, const VecR& chi = VecR::Zero(2));
FamilySpec jumping_family(cd t);
// Ω(t) = [[t, eps],[eps, w0 + a t]]
FamilySpec siegel_family(cd t, cd eps, cd w0, cd a, const VecR& chi = VecR::Zero(4));

// character of L_{[0]-[a(t)]}, a(t) = image of i in C/(Z + tZ)
VecR jumping_character(cd t);
// i ∈ Z + tZ decided with a 2x2 real solve
bool on_jump_locus(cd t, double tol = 1e-9);

}  // namespace torlab
