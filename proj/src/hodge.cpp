#include "torlab/hodge.hpp"

#include <algorithm>
#include <random>

#include <Eigen/SparseLU>

namespace torlab {

struct HodgeImpl {
    bool spectral = false;
    int K = 0, nc = 0;
    double cut = 0;
    // spectral: per-mode eigen-data
    std::vector<MatC> V;
    std::vector<VecR> lam;
    // grid: factorization of □ + sI
    SpMat A;
    double shift = 0;
    int refine = 8;
    std::shared_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu;
    MatC U;  // kernel basis

    VecC project(const VecC& x) const {
        if (!spectral) return U * (U.adjoint() * x);
        VecC out = VecC::Zero(x.size());
        VecC xm(nc);
        for (int m = 0; m < K; ++m) {
            for (int c = 0; c < nc; ++c) xm(c) = x(c * K + m);
            VecC y = VecC::Zero(nc);
            for (int j = 0; j < nc; ++j)
                if (lam[m](j) <= cut) y += V[m].col(j) * V[m].col(j).dot(xm);
            for (int c = 0; c < nc; ++c) out(c * K + m) = y(c);
        }
        return out;
    }

    VecC green(const VecC& x) const {
        if (spectral) {
            VecC out = VecC::Zero(x.size());
            VecC xm(nc);
            for (int m = 0; m < K; ++m) {
                for (int c = 0; c < nc; ++c) xm(c) = x(c * K + m);
                VecC y = VecC::Zero(nc);
                for (int j = 0; j < nc; ++j)
                    if (lam[m](j) > cut) y += V[m].col(j) * (V[m].col(j).dot(xm) / lam[m](j));
                for (int c = 0; c < nc; ++c) out(c * K + m) = y(c);
            }
            return out;
        }
        VecC b = x - U * (U.adjoint() * x);
        VecC g = lu->solve(b);
        g -= U * (U.adjoint() * g);
        for (int it = 0; it < refine; ++it) {
            VecC r = b - A * g;
            if (r.norm() <= 1e-15 * b.norm()) break;
            g += lu->solve(r);
            g -= U * (U.adjoint() * g);
        }
        return g;
    }
};

VecC HodgePackage::project(const VecC& x) const { return impl->project(x); }
VecC HodgePackage::green(const VecC& x) const { return impl->green(x); }

namespace {

OperatorMatrix zero_op(const FormSpace& dom, const FormSpace& cod, int rows) {
    return {dom, cod, SpMat(rows, dom.dim)};
}

// largest eigenvalue of a Hermitian PSD sparse matrix
double lambda_max_power(const SpMat& A, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    VecC x(A.cols());
    for (int i = 0; i < x.size(); ++i) x(i) = cd(nd(rng), nd(rng));
    x.normalize();
    double lam = 0;
    for (int it = 0; it < 500; ++it) {
        VecC y = A * x;
        double ny = y.norm();
        if (ny == 0) return 0;
        double prev = lam;
        lam = x.dot(y).real();
        x = y / ny;
        if (it > 30 && std::abs(lam - prev) < 1e-8 * std::abs(lam)) break;
    }
    // Rayleigh quotient underestimates slowly; take the norm of the last step as upper side
    return std::max(lam, (A * x).norm());
}

void build_spectral(HodgePackage& P, HodgeImpl& I) {
    const auto& S = P.space;
    int K = S.K(), nc = S.ncomp;
    I.spectral = true;
    I.K = K;
    I.nc = nc;
    std::vector<MatC> blocks(K, MatC::Zero(nc, nc));
    const SpMat& A = P.laplacian.data;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            int m = it.row() % K;
            if (it.col() % K != m) throw Error(Err::EigenFailure, "spectral Laplacian not mode-diagonal");
            blocks[m](it.row() / K, it.col() / K) += it.value();
        }
    I.V.resize(K);
    I.lam.resize(K);
    std::vector<double> all;
    all.reserve(K * nc);
    double lmax = 0;
    for (int m = 0; m < K; ++m) {
        Eigen::SelfAdjointEigenSolver<MatC> es(herm(blocks[m]));
        if (es.info() != Eigen::Success) throw Error(Err::EigenFailure, "block eigensolver");
        I.V[m] = es.eigenvectors();
        I.lam[m] = es.eigenvalues();
        for (int j = 0; j < nc; ++j) {
            all.push_back(I.lam[m](j));
            lmax = std::max(lmax, I.lam[m](j));
        }
    }
    P.lambda_max = lmax;
    P.cut = P.rank_tol * lmax;
    I.cut = P.cut;
    std::sort(all.begin(), all.end());
    P.eigenvalues = Eigen::Map<VecR>(all.data(), all.size());
    P.complete_spectrum = true;
    std::vector<VecC> cols;
    for (int m = 0; m < K; ++m)
        for (int j = 0; j < nc; ++j)
            if (I.lam[m](j) <= P.cut) {
                VecC v = VecC::Zero(S.dim);
                for (int c = 0; c < nc; ++c) v(c * K + m) = I.V[m](c, j);
                cols.push_back(v);
            }
    P.harmonic_basis = MatC(S.dim, cols.size());
    for (size_t j = 0; j < cols.size(); ++j) P.harmonic_basis.col(j) = cols[j];
}

void build_grid(HodgePackage& P, HodgeImpl& I, const HodgeOptions& opt) {
    const SpMat& A = P.laplacian.data;
    int N = A.rows();
    std::mt19937 rng(opt.seed);
    P.lambda_max = lambda_max_power(A, rng);
    P.cut = P.rank_tol * P.lambda_max;
    I.cut = P.cut;
    I.A = A;
    I.refine = opt.refine;
    I.shift = 1e-8 * P.lambda_max;
    SpMat As = A;
    SpMat Id(N, N);
    Id.setIdentity();
    As += I.shift * Id;
    As.makeCompressed();
    I.lu = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    I.lu->compute(As);
    if (I.lu->info() != Eigen::Success) throw Error(Err::EigenFailure, "sparse factorization failed");

    // shift-invert subspace iteration for the low end of the spectrum
    int b = std::min(opt.block, N);
    std::normal_distribution<double> nd;
    for (;;) {
        MatC X(N, b);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < b; ++j) X(i, j) = cd(nd(rng), nd(rng));
        VecR theta;
        MatC Xr;
        bool ok = false;
        for (int it = 0; it < 300; ++it) {
            MatC Y(N, b);
            for (int j = 0; j < b; ++j) Y.col(j) = I.lu->solve(X.col(j));
            Eigen::HouseholderQR<MatC> qr(Y);
            X = qr.householderQ() * MatC::Identity(N, b);
            MatC AX = A * X;
            Eigen::SelfAdjointEigenSolver<MatC> es(herm(X.adjoint() * AX));
            theta = es.eigenvalues();
            Xr = X * es.eigenvectors();
            MatC R = A * Xr - Xr * theta.asDiagonal();
            int need = 0;
            while (need < b && theta(need) <= P.cut) ++need;
            need = std::min(b, need + 1);  // kernel plus the first positive value
            bool conv = true;
            for (int j = 0; j < need; ++j)
                if (R.col(j).norm() > 1e-11 * P.lambda_max + 1e-9 * std::abs(theta(j))) conv = false;
            X = Xr;
            if (conv && it > 2) {
                ok = true;
                break;
            }
        }
        if (!ok) throw Error(Err::EigenFailure, "low spectrum did not converge");
        int kdim = 0;
        while (kdim < b && theta(kdim) <= P.cut) ++kdim;
        if (kdim < b - 1 || b == N) {
            P.eigenvalues = theta;
            P.harmonic_basis = Xr.leftCols(kdim);
            break;
        }
        b = std::min(N, 2 * b);
    }
    I.U = P.harmonic_basis;
    P.complete_spectrum = false;
}

}  // namespace

HodgePackage build_hodge(const FormSpace& S, const HodgeOptions& opt) {
    HodgePackage P;
    P.space = S;
    P.rank_tol = opt.rank_tol;
    int n = S.n();
    if (S.q + 1 <= n)
        P.dbar_out = assemble_dbar(S);
    else
        P.dbar_out = zero_op(S, S, 0);
    if (S.q >= 1)
        P.dbar_in = assemble_dbar(make_space(S.fiber, S.p, S.q - 1));
    else
        P.dbar_in = {S, S, SpMat(S.dim, 0)};
    SpMat L = P.dbar_out.data.adjoint() * P.dbar_out.data;
    if (S.q >= 1) L += P.dbar_in.data * SpMat(P.dbar_in.data.adjoint());
    L.prune(cd(0), 0.0);
    P.laplacian = {S, S, L};
    SpMat L10(S.dim, S.dim);
    if (S.p + 1 <= n) {
        auto D = assemble_nabla10(S);
        L10 += SpMat(D.data.adjoint()) * D.data;
    }
    if (S.p >= 1) {
        auto D = assemble_nabla10(make_space(S.fiber, S.p - 1, S.q));
        L10 += D.data * SpMat(D.data.adjoint());
    }
    P.laplacian10 = {S, S, L10};

    auto I = std::make_shared<HodgeImpl>();
    I->K = S.K();
    I->nc = S.ncomp;
    if (S.fiber->disc.kind == DiscKind::Spectral)
        build_spectral(P, *I);
    else
        build_grid(P, *I, opt);
    P.impl = I;
    return P;
}

FormSection green(const HodgePackage& pkg, const FormSection& a) {
    if (!a.space.same(pkg.space)) throw Error(Err::ShapeMismatch, "green: wrong space");
    return FormSection(pkg.space, pkg.green(a.coeffs));
}

FormSection harmonic_project(const HodgePackage& pkg, const FormSection& a) {
    if (!a.space.same(pkg.space)) throw Error(Err::ShapeMismatch, "project: wrong space");
    return FormSection(pkg.space, pkg.project(a.coeffs));
}

std::vector<FormSection> harmonic_sections(const HodgePackage& pkg) {
    std::vector<FormSection> out;
    double s = 1.0 / std::sqrt(pkg.space.fiber->weight);
    for (int j = 0; j < pkg.harmonic_dim(); ++j) out.emplace_back(pkg.space, VecC(s * pkg.harmonic_basis.col(j)));
    return out;
}

FormSection minimal_solution(const HodgePackage& pkg, const FormSection& alpha, double tol) {
    const auto& S = pkg.space;
    if (!alpha.space.same(S)) throw Error(Err::ShapeMismatch, "minimal_solution: wrong space");
    if (S.q < 1) throw Error(Err::BidegreeUnderflow, "minimal_solution needs q >= 1");
    double na = alpha.coeffs.norm();
    FormSpace T = pkg.dbar_in.dom;
    if (na == 0) return FormSection(T);
    if (pkg.dbar_out.data.rows() > 0) {
        // scale-free comparison: ‖∂̄α‖ against ‖∂̄‖‖α‖ would be too lax, so use λmax^{1/2}
        double r = (pkg.dbar_out.data * alpha.coeffs).norm();
        if (r > tol * std::sqrt(std::max(pkg.lambda_max, 1.0)) * na) throw Error(Err::NotClosed, "alpha not dbar-closed");
    }
    if (pkg.project(alpha.coeffs).norm() > tol * na) throw Error(Err::NotCoexact, "alpha has a harmonic part");
    VecC g = pkg.green(alpha.coeffs);
    return FormSection(T, SpMat(pkg.dbar_in.data.adjoint()) * g);
}

FormSection bergman_project(const HodgePackage& pkg_next, const FormSection& f) {
    return FormSection(f.space, f.coeffs - neumann_project(pkg_next, f).coeffs);
}

FormSection neumann_project(const HodgePackage& pkg_next, const FormSection& f) {
    const auto& D = pkg_next.dbar_in;
    if (!f.space.same(D.dom)) throw Error(Err::ShapeMismatch, "bergman: f must live on the source of dbar");
    VecC g = pkg_next.green(D.data * f.coeffs);
    return FormSection(f.space, SpMat(D.data.adjoint()) * g);
}

double smallest_positive_eigenvalue(const HodgePackage& pkg) {
    for (int i = 0; i < pkg.eigenvalues.size(); ++i)
        if (pkg.eigenvalues(i) > pkg.cut) return pkg.eigenvalues(i);
    throw Error(Err::EmptySpectrum, "no eigenvalue above the kernel cut");
}

}  // namespace torlab
