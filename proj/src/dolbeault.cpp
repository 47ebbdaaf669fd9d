#include "torlab/dolbeault.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>

namespace torlab {

namespace {

// central first-derivative weights for offsets 1..r (antisymmetric stencil)
std::vector<double> stencil_weights(int order) {
    switch (order) {
        case 2: return {0.5};
        case 4: return {8.0 / 12, -1.0 / 12};
        case 6: return {45.0 / 60, -9.0 / 60, 1.0 / 60};
        case 8: return {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    }
    throw Error(Err::Precondition, "stencil order must be 2, 4, 6 or 8");
}

// 1-d derivative on the N×N grid (index a*N + b), with the automorphy phase
// applied to ghosts crossing y = 0 or y = 1: g(x, y+1) = e^{−2πi d x} g(x, y)
SpMat grid_derivative(int N, int dir, int d, int order) {
    auto w = stencil_weights(order);
    double h = 1.0 / N;
    std::vector<Eigen::Triplet<cd>> trip;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            int row = a * N + b;
            for (int j = 1; j <= static_cast<int>(w.size()); ++j)
                for (int s : {1, -1}) {
                    int aa = a, bb = b;
                    cd ph = 1.0;
                    if (dir == 0) {
                        aa = ((a + s * j) % N + N) % N;
                    } else {
                        bb = b + s * j;
                        double x = a * h;
                        if (bb >= N) {
                            bb -= N;
                            ph = std::exp(-2.0 * kPi * kI * double(d) * x);
                        } else if (bb < 0) {
                            bb += N;
                            ph = std::exp(2.0 * kPi * kI * double(d) * x);
                        }
                    }
                    trip.emplace_back(row, aa * N + bb, double(s) * w[j - 1] / h * ph);
                }
        }
    SpMat D(N * N, N * N);
    D.setFromTriplets(trip.begin(), trip.end());
    return D;
}

SpMat diag(const VecC& v) {
    SpMat D(v.size(), v.size());
    D.reserve(Eigen::VectorXi::Constant(v.size(), 1));
    for (int i = 0; i < v.size(); ++i) D.insert(i, i) = v(i);
    D.makeCompressed();
    return D;
}

SpMat kron_sum(const std::vector<std::pair<MatC, SpMat>>& terms, int rows_small, int cols_small, int K) {
    std::vector<Eigen::Triplet<cd>> trip;
    for (const auto& [A, S] : terms) {
        for (int r = 0; r < A.rows(); ++r)
            for (int c = 0; c < A.cols(); ++c) {
                cd a = A(r, c);
                if (a == cd(0)) continue;
                for (int k = 0; k < S.outerSize(); ++k)
                    for (SpMat::InnerIterator it(S, k); it; ++it)
                        trip.emplace_back(r * K + it.row(), c * K + it.col(), a * it.value());
            }
    }
    SpMat M(rows_small * K, cols_small * K);
    M.setFromTriplets(trip.begin(), trip.end());
    M.prune(cd(0), 0.0);
    return M;
}

void fill_spectral(Fiber& F) {
    int n = F.n, M = F.disc.size, B = 2 * M + 1;
    F.K = 1;
    for (int i = 0; i < 2 * n; ++i) F.K *= B;
    F.weight = 1.0;
    F.modes.resize(F.K);
    for (int idx = 0; idx < F.K; ++idx) {
        std::vector<int> kl(2 * n);
        int r = idx;
        for (int i = 2 * n - 1; i >= 0; --i) {
            kl[i] = r % B - M;
            r /= B;
        }
        F.modes[idx] = kl;
    }
    const auto& T = F.torus;
    VecR chi = F.bundle.chi.size() == 2 * n ? F.bundle.chi : VecR::Zero(2 * n);
    F.dzbar.assign(n, SpMat());
    for (int a = 0; a < n; ++a) {
        VecC m(F.K);
        for (int idx = 0; idx < F.K; ++idx) {
            const auto& kl = F.modes[idx];
            cd s = 0;
            for (int b = 0; b < n; ++b) {
                cd ok = 0;
                for (int c = 0; c < n; ++c) ok += T.period(b, c) * (kl[c] + chi(c));
                s += T.Yinv(a, b) * ((kl[n + b] + chi(n + b)) - ok);
            }
            m(idx) = -kPi * s;
        }
        F.dzbar[a] = diag(m);
    }
}

void fill_grid(Fiber& F) {
    if (F.n != 1) throw Error(Err::UnsupportedDimension, "grid backend only for n=1");
    int N = F.disc.size;
    F.K = N * N;
    F.weight = 1.0 / F.K;
    F.xs.resize(F.K);
    F.ys.resize(F.K);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            F.xs[a * N + b] = double(a) / N;
            F.ys[a * N + b] = double(b) / N;
        }
    int d = F.bundle.flat() ? 0 : F.bundle.degree;
    SpMat Dx = grid_derivative(N, 0, d, F.stencil), Dy = grid_derivative(N, 1, d, F.stencil);
    cd t = F.torus.period(0, 0);
    double Y = F.torus.Y(0, 0);
    cd c0 = 1.0 / (t - std::conj(t));
    SpMat dz = (kI / (2.0 * Y)) * (Dy - t * Dx);
    VecC pot(F.K);
    TrigField psiz = F.bundle.psi.empty() ? TrigField{} : F.bundle.psi.dzbar(F.torus, 0);
    for (int i = 0; i < F.K; ++i) {
        // gauge s = e^{−iπ d y² t} g makes the wrap t-independent; ψ enters through the unitary frame
        pot(i) = 2.0 * kI * kPi * double(d) * t * F.ys[i] * c0;
        if (!psiz.empty()) pot(i) += 0.5 * psiz.eval(&F.xs[i], &F.ys[i]);
    }
    F.dzbar = {SpMat(dz + diag(pot))};
}

}  // namespace

int Fiber::mode_index(const std::vector<int>& kl) const {
    int M = disc.size, B = 2 * M + 1, idx = 0;
    for (int v : kl) {
        if (v < -M || v > M) return -1;
        idx = idx * B + (v + M);
    }
    return idx;
}

FiberPtr make_fiber(const LatticeTorus& T, const BundleData& B, Disc disc) {
    if ((disc.kind == DiscKind::Spectral) != B.flat())
        throw Error(Err::DiscMismatch, "spectral discretization is for flat bundles, grid for positive ones");
    if (disc.size < 1) throw Error(Err::Precondition, "discretization size must be positive");
    auto F = std::make_shared<Fiber>(T.n);
    F->torus = T;
    F->bundle = B;
    F->disc = disc;
    F->stencil = disc.order;
    if (disc.kind == DiscKind::Spectral)
        fill_spectral(*F);
    else
        fill_grid(*F);
    int n = T.n;
    F->dbar_w.assign(n, SpMat(F->K, F->K));
    F->d_w.assign(n, SpMat(F->K, F->K));
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < n; ++a) {
            cd w = std::conj(T.Cinv(a, j));
            if (w != cd(0)) F->dbar_w[j] += w * F->dzbar[a];
        }
        F->dbar_w[j].makeCompressed();
        F->d_w[j] = -SpMat(F->dbar_w[j].adjoint());
    }
    // curvature in the orthonormal frame: C^{-T} Θ conj(C)^{-1}
    F->theta.assign(n, std::vector<VecC>(n, VecC::Zero(F->K)));
    if (!B.flat()) {
        F->curved = true;
        double Cv = std::abs(T.Cinv(0, 0));
        for (int i = 0; i < F->K; ++i)
            F->theta[0][0](i) = positive_curvature_at(T, B, F->xs[i], F->ys[i]) * Cv * Cv;
    }
    return F;
}

FiberPtr untwisted(const FiberPtr& F) {
    if (F->bundle.flat() && F->bundle.chi.isZero(0.0)) return F;
    BundleData B = make_flat_bundle(F->torus, VecR::Zero(2 * F->n));
    // scalar fields on a grid use the same points with periodic wrap
    auto U = std::make_shared<Fiber>(F->n);
    U->torus = F->torus;
    U->bundle = B;
    U->disc = F->disc;
    U->stencil = F->stencil;
    if (F->disc.kind == DiscKind::Spectral) {
        fill_spectral(*U);
    } else {
        int N = F->disc.size;
        U->K = F->K;
        U->weight = F->weight;
        U->xs = F->xs;
        U->ys = F->ys;
        SpMat Dx = grid_derivative(N, 0, 0, F->stencil), Dy = grid_derivative(N, 1, 0, F->stencil);
        cd t = F->torus.period(0, 0);
        U->dzbar = {SpMat((kI / (2.0 * F->torus.Y(0, 0))) * (Dy - t * Dx))};
    }
    int n = F->n;
    U->dbar_w.assign(n, SpMat(U->K, U->K));
    U->d_w.assign(n, SpMat(U->K, U->K));
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < n; ++a) U->dbar_w[j] += std::conj(F->torus.Cinv(a, j)) * U->dzbar[a];
        U->d_w[j] = -SpMat(U->dbar_w[j].adjoint());
    }
    U->theta.assign(n, std::vector<VecC>(n, VecC::Zero(U->K)));
    return U;
}

FormSpace make_space(const FiberPtr& F, int p, int q) {
    if (p < 0 || q < 0) throw Error(Err::BidegreeUnderflow, "negative bidegree");
    if (p > F->n || q > F->n) throw Error(Err::BidegreeOverflow, "bidegree exceeds dimension");
    FormSpace S;
    S.fiber = F;
    S.p = p;
    S.q = q;
    S.ncomp = F->alg.ncomp(p, q);
    S.dim = S.ncomp * F->K;
    return S;
}

FormSpace make_space(const LatticeTorus& T, const BundleData& B, int p, int q, Disc disc) {
    return make_space(make_fiber(T, B, disc), p, q);
}

FormSection::FormSection(const FormSpace& s, VecC c) : space(s), coeffs(std::move(c)) {
    if (coeffs.size() != s.dim) throw Error(Err::ShapeMismatch, "coefficient length");
}

double FormSection::norm() const { return std::sqrt(std::max(0.0, pair_l2(*this, *this).real())); }

FormSection OperatorMatrix::apply(const FormSection& u) const {
    if (!u.space.same(dom)) throw Error(Err::ShapeMismatch, "operator domain");
    return FormSection(cod, data * u.coeffs);
}

OperatorMatrix assemble_dbar(const FormSpace& S) {
    if (S.q + 1 > S.n()) throw Error(Err::BidegreeOverflow, "dbar out of top degree");
    const auto& F = *S.fiber;
    FormSpace T = make_space(S.fiber, S.p, S.q + 1);
    std::vector<std::pair<MatC, SpMat>> terms;
    for (int j = 0; j < F.n; ++j) terms.emplace_back(F.alg.wedge_gen(F.n + j, S.p, S.q), F.dbar_w[j]);
    return {S, T, kron_sum(terms, T.ncomp, S.ncomp, F.K)};
}

OperatorMatrix assemble_nabla10(const FormSpace& S) {
    if (S.p + 1 > S.n()) throw Error(Err::BidegreeOverflow, "nabla10 out of top degree");
    const auto& F = *S.fiber;
    FormSpace T = make_space(S.fiber, S.p + 1, S.q);
    std::vector<std::pair<MatC, SpMat>> terms;
    for (int j = 0; j < F.n; ++j) terms.emplace_back(F.alg.wedge_gen(j, S.p, S.q), F.d_w[j]);
    return {S, T, kron_sum(terms, T.ncomp, S.ncomp, F.K)};
}

OperatorMatrix adjoint(const OperatorMatrix& A) {
    // the Gram matrix is weight·Id on every space of a fiber
    return {A.cod, A.dom, SpMat(A.data.adjoint())};
}

OperatorMatrix adjoint(const OperatorMatrix& A, const VecR& gd, const VecR& gc) {
    if (gd.size() != A.dom.dim || gc.size() != A.cod.dim) throw Error(Err::ShapeMismatch, "gram size");
    if (gd.minCoeff() <= 0 || gc.minCoeff() <= 0) throw Error(Err::Precondition, "gram not positive");
    SpMat At = A.data.adjoint();
    VecC gi = gd.cwiseInverse().cast<cd>();
    SpMat out = diag(gi) * At * diag(gc.cast<cd>());
    return {A.cod, A.dom, out};
}

OperatorMatrix lefschetz_L(const FormSpace& S) {
    if (S.p + 1 > S.n() || S.q + 1 > S.n()) throw Error(Err::BidegreeOverflow, "L out of range");
    FormSpace T = make_space(S.fiber, S.p + 1, S.q + 1);
    SpMat I(S.K(), S.K());
    I.setIdentity();
    return {S, T, kron_sum({{S.fiber->alg.L(S.p, S.q), I}}, T.ncomp, S.ncomp, S.K())};
}

OperatorMatrix lefschetz_Lambda(const FormSpace& S) {
    if (S.p < 1 || S.q < 1) throw Error(Err::BidegreeUnderflow, "Lambda out of range");
    FormSpace T = make_space(S.fiber, S.p - 1, S.q - 1);
    SpMat I(S.K(), S.K());
    I.setIdentity();
    return {S, T, kron_sum({{S.fiber->alg.Lambda(S.p, S.q), I}}, T.ncomp, S.ncomp, S.K())};
}

OperatorMatrix identity_op(const FormSpace& S) {
    SpMat I(S.dim, S.dim);
    I.setIdentity();
    return {S, S, I};
}

OperatorMatrix curvature_action(const FormSpace& S) {
    if (S.p + 1 > S.n() || S.q + 1 > S.n()) throw Error(Err::BidegreeOverflow, "curvature action out of range");
    const auto& F = *S.fiber;
    FormSpace T = make_space(S.fiber, S.p + 1, S.q + 1);
    std::vector<std::pair<MatC, SpMat>> terms;
    if (F.curved)
        for (int a = 0; a < F.n; ++a)
            for (int b = 0; b < F.n; ++b) {
                MatC W = F.alg.wedge_gen(a, S.p, S.q + 1) * F.alg.wedge_gen(F.n + b, S.p, S.q);
                terms.emplace_back(W, diag(F.theta[a][b]));
            }
    SpMat M = terms.empty() ? SpMat(T.dim, S.dim) : kron_sum(terms, T.ncomp, S.ncomp, F.K);
    return {S, T, M};
}

SpMat bk_curvature_term(const FormSpace& S) {
    // [iΘ, Λ] = iΘ Λ − Λ iΘ, each product only where the bidegrees exist
    int n = S.n();
    SpMat out(S.dim, S.dim);
    if (S.p >= 1 && S.q >= 1) {
        auto Lam = lefschetz_Lambda(S);
        auto Th = curvature_action(Lam.cod);
        out += kI * Th.data * Lam.data;
    }
    if (S.p + 1 <= n && S.q + 1 <= n) {
        auto Th = curvature_action(S);
        auto Lam = lefschetz_Lambda(Th.cod);
        out -= kI * Lam.data * Th.data;
    }
    return out;
}

cd pair_l2(const FormSection& u, const FormSection& v) {
    if (!u.space.same(v.space)) throw Error(Err::ShapeMismatch, "pair_l2 spaces differ");
    return u.space.fiber->weight * v.coeffs.dot(u.coeffs);  // Σ u conj(v)
}

cd hr_pair(const FormSection& u, const FormSection& v) {
    if (!u.space.same(v.space)) throw Error(Err::ShapeMismatch, "hr_pair spaces differ");
    const auto& S = u.space;
    int n = S.n();
    if (S.p + S.q != n) throw Error(Err::Precondition, "hr_pair needs total degree n");
    const auto& F = *S.fiber;
    cd vol = F.alg.volume_coeff();
    cd in2 = std::pow(kI, (n * n) % 4);
    int K = F.K;
    cd acc = 0;
    const auto& cs = S.comps();
    for (int a = 0; a < S.ncomp; ++a)
        for (int b = 0; b < S.ncomp; ++b) {
            unsigned cb, top;
            int s1 = ExtAlg::conj_sign(cs[b], n, cb);
            int s2 = ExtAlg::wedge_sign(cs[a], cb, top);
            if (s2 == 0 || top != F.alg.top()) continue;
            cd pr = v.coeffs.segment(b * K, K).dot(u.coeffs.segment(a * K, K));
            acc += double(s1 * s2) * pr;
        }
    return in2 * acc * F.weight / vol;
}

SpMat mult_field(const FiberPtr& Fp, const VecC& field) {
    const auto& F = *Fp;
    if (field.size() != F.K) throw Error(Err::ShapeMismatch, "field length");
    if (F.disc.kind == DiscKind::Grid) return diag(field);
    // convolution of Fourier coefficients, truncated to the cutoff
    std::vector<Eigen::Triplet<cd>> trip;
    int n2 = 2 * F.n;
    std::vector<int> kl(n2);
    for (int j = 0; j < F.K; ++j) {
        cd fj = field(j);
        if (fj == cd(0)) continue;
        const auto& mj = F.modes[j];
        for (int m = 0; m < F.K; ++m) {
            const auto& mm = F.modes[m];
            for (int i = 0; i < n2; ++i) kl[i] = mm[i] - mj[i];
            int src = F.mode_index(kl);
            if (src >= 0) trip.emplace_back(m, src, fj);
        }
    }
    SpMat M(F.K, F.K);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

VecC field_from_trig(const FiberPtr& Fp, const TrigField& f) {
    const auto& F = *Fp;
    VecC out = VecC::Zero(F.K);
    if (F.disc.kind == DiscKind::Grid) {
        for (int i = 0; i < F.K; ++i) out(i) = f.eval(&F.xs[i], &F.ys[i]);
        return out;
    }
    for (const auto& t : f.terms) {
        std::vector<int> kl = t.k;
        kl.insert(kl.end(), t.l.begin(), t.l.end());
        int idx = F.mode_index(kl);
        if (idx < 0) throw Error(Err::Precondition, "trig field mode outside the spectral cutoff");
        out(idx) += t.c;
    }
    return out;
}

FormSection wedge_scalar_form(const FormSpace& A, const std::vector<VecC>& alpha, const FormSection& beta) {
    const auto& B = beta.space;
    FormSpace T = make_space(B.fiber, A.p + B.p, A.q + B.q);
    FormSection out(T);
    int K = B.K();
    const auto& ca = A.comps();
    const auto& cb = B.comps();
    for (int i = 0; i < A.ncomp; ++i) {
        if (alpha[i].isZero(0.0)) continue;
        SpMat Mf = mult_field(B.fiber, alpha[i]);
        for (int j = 0; j < B.ncomp; ++j) {
            unsigned m;
            int s = ExtAlg::wedge_sign(ca[i], cb[j], m);
            if (!s) continue;
            int r = B.fiber->alg.index_of(m);
            out.coeffs.segment(r * K, K) += double(s) * (Mf * beta.coeffs.segment(j * K, K));
        }
    }
    return out;
}

FormSection contract(const VectorValued01& nu, const FormSection& u) {
    const auto& S = u.space;
    if (S.p < 1) throw Error(Err::BidegreeUnderflow, "contraction needs p >= 1");
    if (S.q + 1 > S.n()) throw Error(Err::BidegreeOverflow, "contraction target");
    const auto& F = *S.fiber;
    int n = F.n, K = F.K;
    const auto& T = F.torus;
    FormSpace R = make_space(S.fiber, S.p - 1, S.q + 1);
    FormSection out(R);
    for (int e = 0; e < n; ++e)
        for (int b = 0; b < n; ++b) {
            VecC Bt = VecC::Zero(K);
            for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) {
                    cd w = T.C(e, a) * std::conj(T.Cinv(c, b));
                    if (w != cd(0)) Bt += w * nu.B[a][c];
                }
            if (Bt.isZero(0.0)) continue;
            MatC W = F.alg.wedge_gen(n + b, S.p - 1, S.q) * F.alg.interior_gen(e, S.p, S.q);
            SpMat Mf = mult_field(S.fiber, Bt);
            for (int r = 0; r < W.rows(); ++r)
                for (int c = 0; c < W.cols(); ++c)
                    if (W(r, c) != cd(0)) out.coeffs.segment(r * K, K) += W(r, c) * (Mf * u.coeffs.segment(c * K, K));
        }
    return out;
}

FormSection contract(const VerticalVectorField& v, const FormSection& u) {
    const auto& S = u.space;
    if (S.p < 1) throw Error(Err::BidegreeUnderflow, "contraction needs p >= 1");
    const auto& F = *S.fiber;
    int n = F.n, K = F.K;
    FormSpace R = make_space(S.fiber, S.p - 1, S.q);
    FormSection out(R);
    for (int e = 0; e < n; ++e) {
        VecC fe = VecC::Zero(K);
        for (int a = 0; a < n; ++a) fe += F.torus.C(e, a) * v.comp[a];
        if (fe.isZero(0.0)) continue;
        MatC W = F.alg.interior_gen(e, S.p, S.q);
        SpMat Mf = mult_field(S.fiber, fe);
        for (int r = 0; r < W.rows(); ++r)
            for (int c = 0; c < W.cols(); ++c)
                if (W(r, c) != cd(0)) out.coeffs.segment(r * K, K) += W(r, c) * (Mf * u.coeffs.segment(c * K, K));
    }
    return out;
}

double power_norm(const SpMat& A, int iters) {
    if (A.nonZeros() == 0) return 0.0;
    VecC x(A.cols());
    for (int i = 0; i < x.size(); ++i) x(i) = cd(1.0 + 0.37 * std::sin(1.3 * i), 0.21 * std::cos(0.7 * i));
    x.normalize();
    double lam = 0;
    for (int it = 0; it < iters; ++it) {
        VecC y = A.adjoint() * (A * x);
        double ny = y.norm();
        if (ny == 0) return 0.0;
        double prev = lam;
        lam = ny;
        x = y / ny;
        if (it > 20 && std::abs(lam - prev) <= 1e-10 * lam) break;
    }
    return std::sqrt(lam);
}

double op_norm(const SpMat& A, const Fiber& F, int rows_comp, int cols_comp) {
    if (A.nonZeros() == 0) return 0.0;
    if (F.disc.kind != DiscKind::Spectral) return power_norm(A);
    int K = F.K;
    std::vector<MatC> blocks(K, MatC::Zero(rows_comp, cols_comp));
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            int m = it.col() % K;
            if (it.row() % K != m) return power_norm(A);  // not mode-diagonal
            blocks[m](it.row() / K, it.col() / K) += it.value();
        }
    double best = 0;
    for (const auto& Bm : blocks) {
        if (Bm.size() == 0) continue;
        Eigen::JacobiSVD<MatC> svd(Bm);
        best = std::max(best, svd.singularValues()(0));
    }
    return best;
}

double op_norm(const OperatorMatrix& A) { return op_norm(A.data, *A.dom.fiber, A.cod.ncomp, A.dom.ncomp); }

void dump_matrix_market(const SpMat& A, const std::string& path) {
    std::ofstream os(path);
    os << "%%MatrixMarket matrix coordinate complex general\n";
    os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    os << std::setprecision(17);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            os << it.row() + 1 << " " << it.col() + 1 << " " << it.value().real() << " " << it.value().imag() << "\n";
}

}  // namespace torlab
