#pragma once

#include "torlab/common.hpp"

namespace torlab {

// Pointwise exterior algebra on an orthonormal coframe e_1..e_n, conj e_1..conj e_n.
// Generator g < n is e_g, generator n+g is its conjugate. Basis elements are
// bitmasks, always read in increasing generator order.
class ExtAlg {
  public:
    explicit ExtAlg(int n);

    int n() const { return n_; }
    // components of bidegree (p,q), lexicographic in (holomorphic index set, antiholomorphic index set)
    const std::vector<unsigned>& comps(int p, int q) const;
    int ncomp(int p, int q) const { return static_cast<int>(comps(p, q).size()); }
    int index_of(unsigned mask) const;  // position inside its own bidegree list

    static int bideg_p(unsigned mask, int n);
    static int bideg_q(unsigned mask, int n);

    // wedge of two basis masks: returns sign (0 if they overlap) and writes the product mask
    static int wedge_sign(unsigned a, unsigned b, unsigned& out);

    // small matrices, rows = target comps, cols = source comps
    MatC wedge_gen(int g, int p, int q) const;     // g∧ : (p,q) -> (p,q)+deg(g)
    MatC interior_gen(int g, int p, int q) const;  // contraction with the dual of g
    MatC L(int p, int q) const;                    // ω∧ with ω = i Σ e_j∧ē_j
    MatC Lambda(int p, int q) const;               // adjoint of L
    // wedge with a fixed basis element from the left
    MatC wedge_mask(unsigned m, int p, int q) const;

    // conjugation maps mask to its conjugate with this sign
    static int conj_sign(unsigned mask, int n, unsigned& out);

    unsigned top() const { return (1u << (2 * n_)) - 1u; }
    // coefficient of the volume form dV = ω^n/n! on e_1..e_n ē_1..ē_n ordering
    cd volume_coeff() const;

  private:
    int n_;
    std::vector<std::vector<std::vector<unsigned>>> comps_;
    std::vector<int> pos_;
};

}  // namespace torlab
