#include "torlab/exterior.hpp"

#include <bit>

namespace torlab {

const char* err_name(Err e) {
    switch (e) {
        case Err::NonPositivePeriod: return "NonPositivePeriod";
        case Err::UnsupportedDimension: return "UnsupportedDimension";
        case Err::Precondition: return "Precondition";
        case Err::DiscMismatch: return "DiscMismatch";
        case Err::BidegreeOverflow: return "BidegreeOverflow";
        case Err::BidegreeUnderflow: return "BidegreeUnderflow";
        case Err::ShapeMismatch: return "ShapeMismatch";
        case Err::EigenFailure: return "EigenFailure";
        case Err::NotCoexact: return "NotCoexact";
        case Err::NotClosed: return "NotClosed";
        case Err::EmptySpectrum: return "EmptySpectrum";
        case Err::HodgeUnavailable: return "HodgeUnavailable";
        case Err::ExtensionNotAdmissible: return "ExtensionNotAdmissible";
        case Err::NotPrimitive: return "NotPrimitive";
        case Err::CurvatureNotInvertible: return "CurvatureNotInvertible";
        case Err::StepTooSmall: return "StepTooSmall";
        case Err::RankJump: return "RankJump";
        case Err::SingularBlock: return "SingularBlock";
        case Err::StencilQuadratureFailure: return "StencilQuadratureFailure";
        case Err::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

double min_eig(const MatC& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatC> es(herm(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

namespace {

// subsets of {0..n-1} of size k in lexicographic order of their sorted elements
void subsets(int n, int k, int start, unsigned cur, std::vector<unsigned>& out) {
    if (k == 0) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i <= n - k; ++i) subsets(n, k - 1, i + 1, cur | (1u << i), out);
}

}  // namespace

ExtAlg::ExtAlg(int n) : n_(n) {
    comps_.assign(n + 1, std::vector<std::vector<unsigned>>(n + 1));
    pos_.assign(1u << (2 * n), -1);
    for (int p = 0; p <= n; ++p) {
        std::vector<unsigned> I;
        subsets(n, p, 0, 0, I);
        for (int q = 0; q <= n; ++q) {
            std::vector<unsigned> J;
            subsets(n, q, 0, 0, J);
            for (unsigned i : I)
                for (unsigned j : J) {
                    unsigned m = i | (j << n);
                    pos_[m] = static_cast<int>(comps_[p][q].size());
                    comps_[p][q].push_back(m);
                }
        }
    }
}

const std::vector<unsigned>& ExtAlg::comps(int p, int q) const {
    static const std::vector<unsigned> empty;
    if (p < 0 || q < 0 || p > n_ || q > n_) return empty;
    return comps_[p][q];
}

int ExtAlg::index_of(unsigned mask) const { return pos_[mask]; }

int ExtAlg::bideg_p(unsigned mask, int n) { return std::popcount(mask & ((1u << n) - 1u)); }
int ExtAlg::bideg_q(unsigned mask, int n) { return std::popcount(mask >> n); }

int ExtAlg::wedge_sign(unsigned a, unsigned b, unsigned& out) {
    out = 0;
    if (a & b) return 0;
    // count inversions: pairs (i in a, j in b) with i > j
    int inv = 0;
    unsigned bb = b;
    while (bb) {
        int j = std::countr_zero(bb);
        bb &= bb - 1;
        inv += std::popcount(a >> (j + 1));
    }
    out = a | b;
    return (inv % 2) ? -1 : 1;
}

MatC ExtAlg::wedge_mask(unsigned m, int p, int q) const {
    int dp = bideg_p(m, n_), dq = bideg_q(m, n_);
    const auto& src = comps(p, q);
    const auto& dst = comps(p + dp, q + dq);
    MatC W = MatC::Zero(dst.size(), src.size());
    for (size_t c = 0; c < src.size(); ++c) {
        unsigned out;
        int s = wedge_sign(m, src[c], out);
        if (s != 0) W(pos_[out], c) = s;
    }
    return W;
}

MatC ExtAlg::wedge_gen(int g, int p, int q) const { return wedge_mask(1u << g, p, q); }

MatC ExtAlg::interior_gen(int g, int p, int q) const {
    // adjoint of wedge_gen in the orthonormal basis
    int dp = g < n_ ? 1 : 0, dq = 1 - dp;
    if (p - dp < 0 || q - dq < 0) return MatC::Zero(0, comps(p, q).size());
    return wedge_gen(g, p - dp, q - dq).adjoint();
}

MatC ExtAlg::L(int p, int q) const {
    const auto& dst = comps(p + 1, q + 1);
    MatC out = MatC::Zero(dst.size(), comps(p, q).size());
    if (dst.empty()) return out;
    for (int j = 0; j < n_; ++j) out += kI * wedge_gen(j, p, q + 1) * wedge_gen(n_ + j, p, q);
    return out;
}

MatC ExtAlg::Lambda(int p, int q) const {
    if (p < 1 || q < 1) return MatC::Zero(0, comps(p, q).size());
    return L(p - 1, q - 1).adjoint();
}

int ExtAlg::conj_sign(unsigned mask, int n, unsigned& out) {
    unsigned lo = mask & ((1u << n) - 1u), hi = mask >> n;
    out = hi | (lo << n);
    int p = std::popcount(lo), q = std::popcount(hi);
    return ((p * q) % 2) ? -1 : 1;
}

cd ExtAlg::volume_coeff() const {
    // ω^n/n! = Π_j (i e_j∧ē_j); reorder into e_1..e_n ē_1..ē_n
    unsigned acc = 0;
    int sign = 1;
    for (int j = 0; j < n_; ++j) {
        unsigned pair;
        int s1 = wedge_sign(1u << j, 1u << (n_ + j), pair);
        unsigned out;
        int s2 = wedge_sign(acc, pair, out);
        sign *= s1 * s2;
        acc = out;
    }
    cd v = static_cast<double>(sign);
    for (int j = 0; j < n_; ++j) v *= kI;
    return v;
}

}  // namespace torlab
