#include "torlab/curvature.hpp"

#include <bit>
#include <cmath>

#include <Eigen/SparseLU>

namespace torlab {

namespace {

// Θ_zz̄ |v|² as a field on the twisted fiber (grid only; flat fibers carry no curvature)
VecC theta_coord(const FiberContext& ctx) {
    const auto& F = *ctx.fiber;
    return F.theta[0][0] * F.torus.kaehler(0, 0).real();
}

MatC gram_of(const std::vector<FormSection>& X, const std::vector<FormSection>& Y) {
    int r = X.size();
    MatC M(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) M(a, b) = pair_l2(X[b], Y[a]);
    return M;
}

double hermitian_defect(const MatC& M) {
    double s = std::max(M.norm(), 1e-300);
    return (M - M.adjoint()).norm() / s;
}

// ι*((ξ⌟Θ)u) on the fiber, orthonormal (1,1) coefficient
VecC xi_theta_u(const FiberContext& ctx, const VecC& v, const FormSection& f) {
    const auto& F = *ctx.fiber;
    if (!F.curved) return VecC::Zero(f.coeffs.size());
    double C = std::sqrt(F.torus.kaehler(0, 0).real());
    return -(F.theta[0][0].cwiseProduct(v).cwiseProduct(C * f.coeffs));
}

}  // namespace

SffResult second_fundamental_form(const FiberContext& ctx, const HorizontalLift& lift, const RepresentativeSet& rep,
                                  double admissible_tol) {
    if (rep.admissibility > admissible_tol)
        throw Error(Err::ExtensionNotAdmissible, "restricted L^{1,0} dbar u does not vanish");
    const auto& P10 = ctx.at(1, 0);
    SffResult out;
    VecC l = rep.lie10.coeffs;
    out.primary = FormSection(P10.space, l - P10.project(l));

    VecC v = vertical_values(ctx, lift)[0];
    FormSpace S11 = make_space(ctx.fiber, 1, 1);
    auto nab = assemble_nabla10(rep.kappa.space);
    VecC src = xi_theta_u(ctx, v, rep.f) + nab.data * rep.kappa.coeffs;
    auto dbar10 = assemble_dbar(P10.space);
    VecC g = P10.green(SpMat(dbar10.data.adjoint()) * src);
    out.green = FormSection(P10.space, -g);
    double nf = std::max(rep.f.norm(), 1e-300);
    FormSection diff(P10.space, out.primary.coeffs - out.green.coeffs);
    out.route_residual = diff.norm() / nf;

    // ∂̄ι*L^{1,0}u + ι*((ξ⌟Θ)u) + ∇^{1,0}κf − ι*L^{1,0}∂̄u
    N1Ops o = n1_ops(ctx);
    VecC lhs = dbar10.data * l + src - lie10_dbar_u(ctx, lift, rep) / o.H;
    out.lemma_residual = FormSection(S11, lhs).norm() / nf;
    return out;
}

cd curvature_L_theta(const FiberContext& ctx, const HorizontalLift& lift, const FormSection& f1, const FormSection& f2,
                     cd sigma, cd tau) {
    // ∫⟨Θ_{ξσ,ξ̄τ} f₁, f₂⟩ − HR(κ_σ f₁, κ_τ f₂)
    cd th = 0;
    const auto& F = *ctx.fiber;
    if (F.curved) {
        VecC v = vertical_values(ctx, lift)[0];
        VecC w = theta_coord(ctx).cwiseProduct(v.cwiseAbs2().cast<cd>());
        th = sigma * std::conj(tau) * pair_l2(FormSection(f1.space, w.cwiseProduct(f1.coeffs)), f2);
    }
    FormSection k1 = kappa(ctx, lift, f1, sigma), k2 = kappa(ctx, lift, f2, tau);
    return th - hr_pair(k1, k2);
}

CurvatureReport curvature_H(const FiberContext& ctx, const HorizontalLift& lift, cd sigma, cd tau) {
    CurvatureReport R;
    R.t = ctx.t;
    R.sigma = sigma;
    R.tau = tau;
    R.rank = static_cast<int>(ctx.basis.size());
    if (ctx.family.id == "jumping") R.near_jump = on_jump_locus(ctx.t, 1e-2);
    int r = R.rank;
    auto empty = [&](MatC& M) { M = MatC::Zero(r, r); };
    empty(R.gram);
    empty(R.term_theta_h);
    empty(R.term_kappa);
    empty(R.term_sff);
    empty(R.theta_H);
    empty(R.theta_H_bly);
    if (r == 0) return R;
    if (ctx.family.id == "jumping") return R;  // rank and locus flag only
    const auto& F = *ctx.fiber;
    VecC v = vertical_values(ctx, lift)[0];

    std::vector<RepresentativeSet> reps;
    std::vector<FormSection> kap, sff, th_f, xdu, w, X;
    FormSpace S00 = make_space(ctx.fiber, 0, 0);
    FormSpace S11 = make_space(ctx.fiber, 1, 1);
    SpMat bk00 = bk_curvature_term(S00);
    auto Lam11 = lefschetz_Lambda(S11);
    SpMat Mv = mult_field(ctx.fiber, v);
    R.sff_routes = 0;
    for (const auto& f : ctx.basis) {
        auto rep = berndtsson_representative(ctx, lift, f);
        auto s = second_fundamental_form(ctx, lift, rep);
        R.res_a.push_back(rep.res_a);
        R.res_b.push_back(rep.res_b);
        R.res_c.push_back(rep.res_c);
        R.admissibility.push_back(rep.admissibility);
        R.kernel_overlap.push_back(rep.kernel_overlap);
        R.sff_routes = std::max(R.sff_routes, s.route_residual);
        kap.push_back(rep.kappa);
        sff.push_back(s.primary);
        xdu.push_back(rep.xi_dbar_u);
        VecC th = VecC::Zero(f.coeffs.size());
        if (F.curved) th = theta_coord(ctx).cwiseProduct(v.cwiseAbs2().cast<cd>()).cwiseProduct(f.coeffs);
        th_f.push_back(FormSection(f.space, th));
        // ξ⌟u = v g₀ + V and Λ ι*(ξ⌟iΘ) f
        w.push_back(FormSection(S00, Mv * rep.g0 + rep.V));
        VecC a11 = kI * xi_theta_u(ctx, v, f);
        X.push_back(FormSection(S00, Lam11.data * a11));
        reps.push_back(std::move(rep));
    }
    R.gram = gram_of(ctx.basis, ctx.basis);
    R.term_theta_h = gram_of(th_f, ctx.basis);
    R.term_kappa = MatC(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) R.term_kappa(a, b) = hr_pair(kap[b], kap[a]);
    R.term_sff = gram_of(sff, sff);
    MatC three = R.term_theta_h - R.term_kappa - R.term_sff;

    MatC bly = R.term_theta_h;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            FormSection Aw(S00, bk00 * w[b].coeffs);
            bly(a, b) += -pair_l2(Aw, w[a]) + pair_l2(X[b], w[a]) + pair_l2(w[b], X[a]) + pair_l2(xdu[b], xdu[a]);
        }
    R.hermitian_defect = std::max(hermitian_defect(three), hermitian_defect(bly));
    three = herm(three);
    bly = herm(bly);
    R.nakano_min_eig = min_eig(three);
    R.sff_min_eig = min_eig(herm(R.term_sff));
    R.residual_routes = (three - bly).norm() / std::max(three.norm(), 1e-300);
    cd s = sigma * std::conj(tau);
    R.term_theta_h *= s;
    R.term_kappa *= s;
    R.term_sff *= s;
    R.theta_H = s * three;
    R.theta_H_bly = s * bly;
    return R;
}

double lift_independence_check(const FiberContext& ctx, const HorizontalLift& l1, const HorizontalLift& l2, cd sigma,
                               cd tau) {
    auto a = curvature_H(ctx, l1, sigma, tau);
    auto b = curvature_H(ctx, l2, sigma, tau);
    double s = a.theta_H.norm();
    if (s == 0) return (a.theta_H - b.theta_H).norm();
    return (a.theta_H - b.theta_H).norm() / s;
}

FormSection lefschetz_power(const FormSection& a, int j) {
    FormSection out = a;
    for (int i = 0; i < j; ++i) out = lefschetz_L(out.space).apply(out);
    return out;
}

namespace {

// apply a pointwise small matrix to a coefficient vector laid out component-major
VecC pointwise(const MatC& M, const VecC& x, int K) {
    Eigen::Map<const MatC> X(x.data(), K, M.cols());
    MatC Y = X * M.transpose();
    return Eigen::Map<const VecC>(Y.data(), Y.size());
}

}  // namespace

std::vector<FormSection> lefschetz_decompose(const FormSection& alpha) {
    const auto& S = alpha.space;
    const auto& A = S.fiber->alg;
    int n = S.n(), K = S.K(), p = S.p, q = S.q;
    std::vector<FormSection> out;
    // primitive part: orthogonal projection onto ker Λ (zero if p+q > n)
    FormSection a0(S);
    if (p + q <= n) {
        MatC Lam = A.Lambda(p, q);
        MatC P = MatC::Identity(S.ncomp, S.ncomp);
        if (Lam.rows() > 0) {
            Eigen::CompleteOrthogonalDecomposition<MatC> cod(Lam);
            P -= cod.pseudoInverse() * Lam;
        }
        a0.coeffs = pointwise(P, alpha.coeffs, K);
    }
    out.push_back(a0);
    VecC rest = alpha.coeffs - a0.coeffs;
    if (p >= 1 && q >= 1 && rest.norm() > 0) {
        // rest = ω ∧ β with β of bidegree (p−1,q−1)
        MatC L = A.L(p - 1, q - 1);
        Eigen::CompleteOrthogonalDecomposition<MatC> cod(L);
        FormSpace S1 = make_space(S.fiber, p - 1, q - 1);
        FormSection beta(S1, pointwise(cod.pseudoInverse(), rest, K));
        auto sub = lefschetz_decompose(beta);
        for (auto& c : sub) out.push_back(c);
    }
    // drop trailing zero components
    while (out.size() > 1 && out.back().coeffs.norm() == 0) out.pop_back();
    return out;
}

HRResult hodge_riemann_check(const FormSection& alpha, double tol) {
    const auto& S = alpha.space;
    int n = S.n(), p = S.p, q = S.q, k = p + q;
    if (k > n) throw Error(Err::NotPrimitive, "degree exceeds n");
    double na = alpha.norm();
    HRResult R{0, 0, 0};
    if (na == 0) return R;
    if (k >= 1 && p >= 1 && q >= 1) {
        FormSection l = lefschetz_Lambda(S).apply(alpha);
        if (l.norm() > tol * na) throw Error(Err::NotPrimitive, "form is not primitive");
    }
    // i^{k²} α∧ᾱ∧ω^{n−k}/(n−k)! against (−1)^q |α|² dV, pointwise in the orthonormal frame
    const auto& A = S.fiber->alg;
    int K = S.K();
    const auto& cs = S.comps();
    // ω^{n−k}/(n−k)! as a sum of basis masks: products of distinct i e_j∧ē_j
    std::vector<std::pair<unsigned, cd>> wpow;
    for (unsigned sub = 0; sub < (1u << n); ++sub) {
        if (std::popcount(sub) != n - k) continue;
        unsigned acc = 0;
        cd c = 1.0;
        for (int j = 0; j < n; ++j)
            if (sub & (1u << j)) {
                unsigned pr, o2;
                int s1 = ExtAlg::wedge_sign(1u << j, 1u << (n + j), pr);
                int s2 = ExtAlg::wedge_sign(acc, pr, o2);
                c *= kI * double(s1 * s2);
                acc = o2;
            }
        wpow.push_back({acc, c});
    }
    cd vol = A.volume_coeff();
    cd lhs = 0;
    for (int a = 0; a < S.ncomp; ++a)
        for (int b = 0; b < S.ncomp; ++b) {
            unsigned cb, m1, m2;
            int s1 = ExtAlg::conj_sign(cs[b], n, cb);
            int s2 = ExtAlg::wedge_sign(cs[a], cb, m1);
            if (!s2) continue;
            cd coef = 0;
            for (auto [wm, wc] : wpow) {
                int s3 = ExtAlg::wedge_sign(m1, wm, m2);
                if (s3 && m2 == A.top()) coef += double(s3) * wc;
            }
            if (coef == cd(0)) continue;
            cd pr = alpha.coeffs.segment(b * K, K).dot(alpha.coeffs.segment(a * K, K));
            lhs += double(s1 * s2) * coef * pr;
        }
    lhs *= std::pow(kI, (k * k) % 4) * S.fiber->weight / vol;
    R.lhs = lhs;
    R.rhs = (q % 2 ? -1.0 : 1.0) * na * na;
    R.residual = std::abs(R.lhs - R.rhs) / (na * na);
    return R;
}

XuWangResult xu_wang_bound(const FiberContext& ctx, const HorizontalLift& lift, cd sigma) {
    const auto& F = *ctx.fiber;
    if (!F.curved) throw Error(Err::CurvatureNotInvertible, "flat bundle: [iΘ,Λ] vanishes");
    FormSpace S11 = make_space(ctx.fiber, 1, 1);
    SpMat A = bk_curvature_term(S11);
    double mn = 1e300;
    for (int i = 0; i < A.rows(); ++i) mn = std::min(mn, A.coeff(i, i).real());
    if (mn < 1e-10) throw Error(Err::CurvatureNotInvertible, "[iΘ,Λ] not positive");
    Eigen::SparseLU<SpMat> lu(A);
    auto rep = curvature_H(ctx, lift, sigma, sigma);
    VecC v = vertical_values(ctx, lift)[0];
    int r = rep.rank;
    std::vector<FormSection> Tf, AiTf;
    for (const auto& f : ctx.basis) {
        FormSection t(S11, sigma * xi_theta_u(ctx, v, f));
        Tf.push_back(t);
        AiTf.push_back(FormSection(S11, lu.solve(t.coeffs)));
    }
    XuWangResult X;
    X.lhs = rep.theta_H;
    X.rhs = rep.term_theta_h;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) X.rhs(a, b) -= pair_l2(AiTf[b], Tf[a]);
    X.margin = min_eig(herm(X.lhs - X.rhs));
    return X;
}

}  // namespace torlab
