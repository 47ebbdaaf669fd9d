#include "torlab/identities.hpp"

#include <limits>
#include <random>

#include "torlab/oracle.hpp"

namespace torlab {

namespace {

OperatorMatrix mul(const OperatorMatrix& A, const OperatorMatrix& B) {
    if (!A.dom.same(B.cod)) throw Error(Err::ShapeMismatch, "composition spaces differ");
    return {B.dom, A.cod, A.data * B.data};
}

OperatorMatrix scaled(const OperatorMatrix& A, cd s) { return {A.dom, A.cod, s * A.data}; }

OperatorMatrix zero_op(const FormSpace& S, const FormSpace& T) { return {S, T, SpMat(T.dim, S.dim)}; }

void add(OperatorMatrix& A, const OperatorMatrix& B) {
    if (!A.dom.same(B.dom) || !A.cod.same(B.cod)) throw Error(Err::ShapeMismatch, "sum spaces differ");
    A.data += B.data;
}

// □ for ∂̄ (holo = false) or ∇^{1,0} (holo = true) on S
OperatorMatrix laplace(const FormSpace& S, bool holo) {
    int n = S.n();
    OperatorMatrix out = zero_op(S, S);
    int up = holo ? S.p : S.q;
    auto D = [holo](const FormSpace& X) { return holo ? assemble_nabla10(X) : assemble_dbar(X); };
    if (up + 1 <= n) {
        auto A = D(S);
        add(out, mul(adjoint(A), A));
    }
    if (up >= 1) {
        FormSpace below = holo ? make_space(S.fiber, S.p - 1, S.q) : make_space(S.fiber, S.p, S.q - 1);
        auto A = D(below);
        add(out, mul(A, adjoint(A)));
    }
    return out;
}

struct Measure {
    bool grid;
    std::vector<FormSection> tests;
    double operator()(const OperatorMatrix& R, const OperatorMatrix& lead, const OperatorMatrix* lead2 = nullptr) const {
        if (!grid) return op_norm(R) / std::max({op_norm(lead), lead2 ? op_norm(*lead2) : 0.0, 1.0});
        double worst = 0;
        for (const auto& x : tests) {
            double s = std::max((lead.data * x.coeffs).norm(), x.coeffs.norm());
            if (lead2) s = std::max(s, (lead2->data * x.coeffs).norm());
            worst = std::max(worst, (R.data * x.coeffs).norm() / s);
        }
        return worst;
    }
};

}  // namespace

std::vector<FormSection> smooth_test_sections(const FormSpace& S, int count, unsigned seed) {
    const auto& F = *S.fiber;
    if (F.disc.kind != DiscKind::Grid) throw Error(Err::DiscMismatch, "smooth test sections are for grid fibers");
    std::mt19937 rng(seed);
    int d = F.bundle.flat() ? 0 : F.bundle.degree;
    ThetaFrame th = theta_frame(F.torus.period(0, 0), d, F);
    auto U = untwisted(S.fiber);
    std::vector<FormSection> out;
    for (int c = 0; c < count; ++c) {
        FormSection x(S);
        for (int comp = 0; comp < S.ncomp; ++comp) {
            VecC f = field_from_trig(U, random_trig(F.n, 1, 1.0, rng));
            const VecC& g = th.g[(c + comp) % th.g.size()];
            x.coeffs.segment(comp * F.K, F.K) = (g.array() * (f.array() + 1.5)).matrix();
        }
        out.push_back(x);
    }
    return out;
}

std::vector<IdentityCheck> identity_suite(const FiberPtr& F, const IdentityTolerances& tol) {
    int n = F->n;
    bool grid = F->disc.kind == DiscKind::Grid;
    std::vector<IdentityCheck> out;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            FormSpace S = make_space(F, p, q);
            Measure m{grid, {}};
            if (grid) m.tests = smooth_test_sections(S, 3, 17u + 7u * (p * (n + 1) + q));
            double t = grid ? tol.grid : tol.spectral;
            double t2 = grid ? tol.grid_dbar2 : tol.spectral;
            if (q + 2 <= n) {
                auto A = assemble_dbar(S);
                auto B = assemble_dbar(A.cod);
                out.push_back({"dbar_squared", p, q, m(mul(B, A), A) / std::max(op_norm(B), 1.0), t2});
            }
            if (p + 2 <= n) {
                auto A = assemble_nabla10(S);
                auto B = assemble_nabla10(A.cod);
                out.push_back({"nabla10_squared", p, q, m(mul(B, A), A) / std::max(op_norm(B), 1.0), t2});
            }
            // [Λ, ∂̄] + i ∇^{1,0*} on (p,q) -> (p−1,q)
            if (p >= 1) {
                FormSpace T = make_space(F, p - 1, q);
                auto nab = assemble_nabla10(T);
                OperatorMatrix R = scaled(adjoint(nab), kI);
                if (q + 1 <= n) add(R, mul(lefschetz_Lambda(make_space(F, p, q + 1)), assemble_dbar(S)));
                if (q >= 1) add(R, scaled(mul(assemble_dbar(make_space(F, p - 1, q - 1)), lefschetz_Lambda(S)), -1.0));
                out.push_back({"hodge_identity_dbar", p, q, m(R, adjoint(nab)), t});
            }
            // [Λ, ∇^{1,0}] − i ∂̄* on (p,q) -> (p,q−1)
            if (q >= 1) {
                FormSpace T = make_space(F, p, q - 1);
                auto db = assemble_dbar(T);
                OperatorMatrix R = scaled(adjoint(db), -kI);
                if (p + 1 <= n) add(R, mul(lefschetz_Lambda(make_space(F, p + 1, q)), assemble_nabla10(S)));
                if (p >= 1) add(R, scaled(mul(assemble_nabla10(make_space(F, p - 1, q - 1)), lefschetz_Lambda(S)), -1.0));
                out.push_back({"hodge_identity_nabla10", p, q, m(R, adjoint(db)), t});
            }
            // □ − □^{1,0} − [iΘ, Λ]
            {
                auto L2 = laplace(S, false), L1 = laplace(S, true);
                OperatorMatrix R = L2;
                add(R, scaled(L1, -1.0));
                R.data -= bk_curvature_term(S);
                out.push_back({"bochner_kodaira", p, q, m(R, L2, &L1), t});
            }
            // [L, Λ] − (p+q−n) Id
            {
                OperatorMatrix R = scaled(identity_op(S), -double(p + q - n));
                if (p >= 1 && q >= 1) add(R, mul(lefschetz_L(make_space(F, p - 1, q - 1)), lefschetz_Lambda(S)));
                if (p + 1 <= n && q + 1 <= n) add(R, scaled(mul(lefschetz_Lambda(make_space(F, p + 1, q + 1)), lefschetz_L(S)), -1.0));
                out.push_back({"lefschetz_commutator", p, q, m(R, identity_op(S)), t});
            }
        }
    return out;
}

std::vector<IdentityCheck> decomposition_suite(const FiberPtr& F, const HodgeOptions& opt,
                                               const IdentityTolerances& tol) {
    int n = F->n;
    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> nd;
    std::vector<IdentityCheck> out;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            auto P = build_hodge(make_space(F, p, q), opt);
            VecC x(P.space.dim);
            for (int i = 0; i < x.size(); ++i) x(i) = cd(nd(rng), nd(rng));
            VecC r = x - P.project(x) - P.laplacian.data * P.green(x);
            out.push_back({"hodge_decomposition", p, q, r.norm() / x.norm(), tol.decomposition});
        }
    return out;
}

IdentityCheck minimal_norm_check(const HodgePackage& pkg, unsigned seed, double tol) {
    const auto& S = pkg.space;
    if (S.q < 1) throw Error(Err::BidegreeUnderflow, "minimal-norm check needs q >= 1");
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    VecC g(pkg.dbar_in.dom.dim);
    for (int i = 0; i < g.size(); ++i) g(i) = cd(nd(rng), nd(rng));
    VecC a = pkg.dbar_in.data * g;
    a -= pkg.project(a);
    FormSection alpha(S, a);
    FormSection u = minimal_solution(pkg, alpha);
    double w = S.fiber->weight;
    double lhs = w * u.coeffs.squaredNorm();
    double rhs = (w * a.dot(pkg.green(a))).real();
    double r1 = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    double r2 = (pkg.dbar_in.data * u.coeffs - a).norm() / std::max(a.norm(), 1e-300);
    return {"minimal_norm", S.p, S.q, std::max(r1, r2), tol};
}

IdentityCheck spectrum_check(const HodgePackage& pkg, double tol) {
    const auto& S = pkg.space;
    const auto& F = *S.fiber;
    if (F.disc.kind != DiscKind::Spectral || !pkg.complete_spectrum)
        throw Error(Err::DiscMismatch, "closed-form spectra exist for flat spectral packages");
    VecR ex = exact_flat_spectrum(F.torus, F.bundle.chi, S.p, S.q, F.disc.size);
    double r = std::numeric_limits<double>::infinity();
    if (ex.size() == pkg.eigenvalues.size())
        r = (ex - pkg.eigenvalues).cwiseAbs().maxCoeff() / std::max(ex.maxCoeff(), 1.0);
    return {"flat_spectrum", S.p, S.q, r, tol};
}

IdentityCheck kernel_check(const HodgePackage& pkg) {
    const auto& S = pkg.space;
    const auto& F = *S.fiber;
    VecR ex = exact_flat_spectrum(F.torus, F.bundle.chi, S.p, S.q, F.disc.size);
    int k = kernel_count(ex, pkg.rank_tol);
    return {"kernel_dimension", S.p, S.q, double(std::abs(k - pkg.harmonic_dim())), 0.0};
}

}  // namespace torlab
