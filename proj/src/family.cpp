#include "torlab/family.hpp"

#include <algorithm>
#include <cmath>

namespace torlab {

namespace {

int pidx(int n, int p, int q) { return p * (n + 1) + q; }

VecC const_field(const FiberPtr& F, cd value) {
    VecC out = VecC::Zero(F->K);
    if (F->disc.kind == DiscKind::Grid) {
        out.setConstant(value);
    } else {
        out(F->mode_index(std::vector<int>(2 * F->n, 0))) = value;
    }
    return out;
}

}  // namespace

const HodgePackage& FiberContext::at(int p, int q) const {
    if (!has(p, q)) throw Error(Err::HodgeUnavailable, "no Hodge package for this bidegree");
    return pkg[pidx(n(), p, q)];
}

bool FiberContext::has(int p, int q) const {
    int i = pidx(n(), p, q);
    return i >= 0 && i < static_cast<int>(have.size()) && have[i];
}

Disc default_disc(const FamilySpec& fam) {
    if (fam.kind == BundleKind::Positive) return Disc::grid(64, 8);
    return Disc::spectral(fam.n == 1 ? 8 : 4);
}

FiberContext make_context(const FamilySpec& fam, cd t, Disc disc, const HodgeOptions& opt) {
    FiberContext ctx;
    ctx.family = fam;
    ctx.t = t;
    LatticeTorus T = fam.torus_at(t);
    BundleData B = fam.bundle_at(t);
    ctx.fiber = make_fiber(T, B, disc);
    ctx.ufiber = untwisted(ctx.fiber);
    int n = fam.n;
    ctx.pkg.resize((n + 1) * (n + 1));
    ctx.have.assign((n + 1) * (n + 1), false);
    std::vector<std::pair<int, int>> want;
    if (n == 1)
        want = {{1, 0}, {0, 1}, {1, 1}};
    else
        want = {{2, 0}, {0, 2}};
    for (auto [p, q] : want) {
        ctx.pkg[pidx(n, p, q)] = build_hodge(make_space(ctx.fiber, p, q), opt);
        ctx.have[pidx(n, p, q)] = true;
    }
    ctx.basis = harmonic_sections(ctx.at(n, 0));
    return ctx;
}

TrigField random_trig(int n, int maxmode, double amp, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<int>> kl;
    std::vector<double> a, b;
    int B = 2 * maxmode + 1, tot = 1;
    for (int i = 0; i < 2 * n; ++i) tot *= B;
    for (int idx = 1; idx < tot; ++idx) {
        std::vector<int> m(2 * n);
        int r = idx;
        for (int i = 2 * n - 1; i >= 0; --i) {
            m[i] = r % B - maxmode;
            r /= B;
        }
        // one representative of each ± pair
        auto first = std::find_if(m.begin(), m.end(), [](int v) { return v != 0; });
        if (first == m.end() || *first < 0) continue;
        kl.push_back(m);
        a.push_back(u(rng));
        b.push_back(u(rng));
    }
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += std::hypot(a[i], b[i]);
    for (size_t i = 0; i < a.size(); ++i) {
        a[i] *= amp / s;
        b[i] *= amp / s;
    }
    return real_trig(n, kl, a, b);
}

HorizontalLift trivialization_lift(const FiberContext& ctx, std::vector<TrigField> pert) {
    HorizontalLift L;
    L.kind = LiftKind::Trivialization;
    L.ufiber = ctx.ufiber;
    if (!pert.empty() && static_cast<int>(pert.size()) != ctx.n())
        throw Error(Err::ShapeMismatch, "one perturbation field per coordinate");
    L.pert = std::move(pert);
    return L;
}

MatC ks_constant(const FamilySpec& fam, cd t) {
    MatC O = fam.period(t);
    MatC dO = fam.dperiod(t);
    MatC diff = O - O.conjugate();
    return -dO * diff.inverse();
}

std::vector<VecC> vertical_values(const FiberContext& ctx, const HorizontalLift& lift) {
    int n = ctx.n();
    std::vector<VecC> v(n, VecC::Zero(ctx.ufiber->K));
    for (int a = 0; a < static_cast<int>(lift.pert.size()); ++a) v[a] += field_from_trig(ctx.ufiber, lift.pert[a]);
    for (int a = 0; a < static_cast<int>(lift.eta.size()); ++a) v[a] -= lift.eta[a];
    return v;
}

std::vector<std::vector<VecC>> vertical_dzbar(const FiberContext& ctx, const HorizontalLift& lift) {
    int n = ctx.n();
    const auto& T = ctx.fiber->torus;
    std::vector<std::vector<VecC>> d(n, std::vector<VecC>(n, VecC::Zero(ctx.ufiber->K)));
    for (int a = 0; a < static_cast<int>(lift.pert.size()); ++a)
        for (int c = 0; c < n; ++c) d[a][c] += field_from_trig(ctx.ufiber, lift.pert[a].dzbar(T, c));
    for (int a = 0; a < static_cast<int>(lift.eta.size()); ++a)
        for (int c = 0; c < n; ++c) d[a][c] -= ctx.ufiber->dzbar[c] * lift.eta[a];
    return d;
}

VectorValued01 ks_representative(const FiberContext& ctx, const HorizontalLift& lift, cd tau) {
    int n = ctx.n();
    MatC A = ks_constant(ctx.family, ctx.t);
    auto dv = vertical_dzbar(ctx, lift);
    VectorValued01 nu;
    nu.fiber = ctx.ufiber;
    nu.n = n;
    nu.B.assign(n, std::vector<VecC>(n));
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) nu.B[a][c] = tau * (const_field(ctx.ufiber, A(a, c)) + dv[a][c]);
    return nu;
}

FormSection kappa(const FiberContext& ctx, const HorizontalLift& lift, const FormSection& f, cd tau) {
    return contract(ks_representative(ctx, lift, tau), f);
}

HorizontalLift primitive_lift(const FiberContext& ctx, const HorizontalLift& base) {
    int n = ctx.n();
    if (n == 1) return base;  // no (0,2)-forms
    HorizontalLift out = base;
    out.kind = LiftKind::Primitive;
    const auto& UF = ctx.ufiber;
    HodgePackage own;
    const HodgePackage* p02 = nullptr;
    if (UF == ctx.fiber && ctx.has(0, 2)) {
        p02 = &ctx.at(0, 2);
    } else {
        own = build_hodge(make_space(UF, 0, 2));
        p02 = &own;
    }
    // ω as a constant untwisted (1,1)-form
    FormSpace S11 = make_space(UF, 1, 1);
    FormSection omega(S11);
    for (int j = 0; j < n; ++j) {
        unsigned m = (1u << j) | (1u << (n + j));
        int r = UF->alg.index_of(m);
        omega.coeffs.segment(r * UF->K, UF->K) = const_field(UF, kI);
    }
    VectorValued01 nu = ks_representative(ctx, base, 1.0);
    FormSection beta = contract(nu, omega);  // (0,2)
    VecC g = p02->green(beta.coeffs);
    VecC zeta = SpMat(p02->dbar_in.data.adjoint()) * g;  // (0,1), components ē_e
    int K = UF->K;
    const auto& T = UF->torus;
    std::vector<VecC> eta(n, VecC::Zero(K));
    for (int a = 0; a < n; ++a)
        for (int e = 0; e < n; ++e) eta[a] += T.Cinv(a, e) * (-kI) * zeta.segment(e * K, K);
    if (out.eta.empty()) out.eta.assign(n, VecC::Zero(K));
    for (int a = 0; a < n; ++a) out.eta[a] += eta[a];
    return out;
}

double primitivity_residual(const FiberContext& ctx, const HorizontalLift& lift) {
    double worst = 0;
    for (const auto& f : ctx.basis) {
        FormSection k = kappa(ctx, lift, f, 1.0);
        if (k.space.p + k.space.q + 2 > 2 * ctx.n()) continue;
        auto L = lefschetz_L(k.space);
        worst = std::max(worst, L.apply(k).norm() / f.norm());
    }
    return worst;
}

N1Ops n1_ops(const FiberContext& ctx) {
    if (ctx.n() != 1) throw Error(Err::UnsupportedDimension, "fiber calculus implemented for n=1");
    N1Ops o;
    const auto& F = *ctx.fiber;
    o.Dbar = F.dzbar[0];
    o.D = -SpMat(o.Dbar.adjoint());
    o.Y = F.torus.Y(0, 0);
    o.H = F.torus.kaehler(0, 0).real();
    o.C = std::sqrt(o.H);
    o.t = ctx.t;
    o.c = -ks_constant(ctx.family, ctx.t)(0, 0);
    o.theta_c = F.theta[0][0] * o.H;  // stored in the orthonormal frame
    o.weight = F.weight;
    return o;
}

namespace {

SpMat field_op(const FiberContext& ctx, const VecC& f) { return mult_field(ctx.fiber, f); }

// pointwise complex conjugate of a field; spectral coefficients reflect the modes
VecC conj_field(const FiberPtr& F, const VecC& v) {
    if (F->disc.kind == DiscKind::Grid) return v.conjugate();
    VecC out(v.size());
    for (int i = 0; i < F->K; ++i) {
        auto m = F->modes[i];
        for (auto& x : m) x = -x;
        out(F->mode_index(m)) = std::conj(v(i));
    }
    return out;
}

}  // namespace

VecC lie10_dbar_u(const FiberContext& ctx, const HorizontalLift& lift, const RepresentativeSet& rep) {
    N1Ops o = n1_ops(ctx);
    VecC v = vertical_values(ctx, lift)[0];
    VecC Dg0 = o.Dbar * rep.g0;
    return -(o.Dbar * rep.g1) - o.c * Dg0 - o.D * (field_op(ctx, v) * Dg0) - o.c * (o.D * rep.g0);
}

RepresentativeSet berndtsson_representative(const FiberContext& ctx, const HorizontalLift& lift,
                                            const FormSection& f, const VecC* g2, double tol) {
    N1Ops o = n1_ops(ctx);
    const auto& P10 = ctx.at(1, 0);
    const auto& P01 = ctx.at(0, 1);
    const auto& P11 = ctx.at(1, 1);
    if (!f.space.same(P10.space)) throw Error(Err::ShapeMismatch, "f must be a (1,0)-form on the context fiber");
    RepresentativeSet R;
    R.f = f;
    int K = ctx.fiber->K;
    double Cinv = 1.0 / o.C;
    R.g0 = o.C * f.coeffs;
    R.g2 = g2 ? *g2 : VecC::Zero(K);

    // g₁: minimal solution of ∂̄(g₁ dz) = c ∂g₀ dz∧dz̄, i.e. ∂̄g₁ = −c ∂g₀
    VecC alpha = (o.c * (o.D * R.g0)) / o.H;
    double na = alpha.norm();
    VecC alpha_h = P11.project(alpha);
    R.kernel_overlap = na > 0 ? alpha_h.norm() / na : 0.0;
    VecC e = SpMat(P11.dbar_in.data.adjoint()) * P11.green(alpha);
    R.g1 = o.C * e;

    // V = ∇^{1,0*} G (P⊥ φ⁰), φ⁰ = g₁ + c g₀
    VecC phi0 = (R.g1 + o.c * R.g0) * Cinv;
    VecC perp = phi0 - P10.project(phi0);
    SpMat dw = ctx.fiber->d_w[0];
    R.V = SpMat(dw.adjoint()) * P10.green(perp);

    VecC v = vertical_values(ctx, lift)[0];
    VecC vz = vertical_dzbar(ctx, lift)[0][0];
    SpMat Mv = field_op(ctx, v), Mvz = field_op(ctx, vz);
    VecC Dbg0 = o.Dbar * R.g0;

    FormSpace S01 = P01.space;
    R.kappa = FormSection(S01, (Mvz * R.g0 - o.c * R.g0) * Cinv);
    R.xi_dbar_u = FormSection(S01, -(Mv * Dbg0 + o.c * R.g0 + o.Dbar * R.V) * Cinv);
    R.xi_nabla_u = FormSection(P10.space, (R.g1 + o.c * R.g0 - o.D * R.V) * Cinv);
    R.lie10 = FormSection(P10.space, (o.D * (Mv * R.g0) + R.g1 + o.c * R.g0) * Cinv);
    R.lie01 = FormSection(P10.space, (R.g2 + field_op(ctx, conj_field(ctx.ufiber, v)) * Dbg0) * Cinv);

    VecC l = lie10_dbar_u(ctx, lift, R);
    double denom = std::max({(o.c * (o.D * R.g0)).norm(), R.g0.norm(), 1e-300});
    R.admissibility = l.norm() / denom;

    // (a) primitivity: Λ on (0,1) is zero for n=1
    R.res_a = 0.0;
    // (b) P⊥ ι*(ξ⌟∇u) = 0
    double nf = std::max(f.norm(), phi0.norm() * std::sqrt(ctx.fiber->weight));
    VecC xn = R.xi_nabla_u.coeffs;
    R.res_b = (xn - P10.project(xn)).norm() * std::sqrt(ctx.fiber->weight) / nf;
    // (c) κf and ι*(ξ⌟∂̄u) share their harmonic part
    VecC diff = R.kappa.coeffs - R.xi_dbar_u.coeffs;
    double nk = std::max(R.kappa.coeffs.norm(), 1e-300);
    R.res_c = P01.project(diff).norm() / nk;
    R.primitive_ok = R.res_a <= tol;
    R.orthogonality_ok = R.res_b <= tol;
    return R;
}

std::pair<cd, cd> lie_product_rule_check(const FiberContext& ctx, const RepresentativeSet& rep, double step) {
    N1Ops o = n1_ops(ctx);
    auto gram = [&](cd dt) {
        cd tp = ctx.t + dt;
        double Yp = ctx.family.period(tp)(0, 0).imag();
        VecC g = rep.g0 + dt * rep.g1 + std::conj(dt) * rep.g2;
        return 2.0 * Yp * o.weight * g.squaredNorm();
    };
    // ∂_t = ½(∂_x − i∂_y)
    double dx = (gram(step) - gram(-step)) / (2 * step);
    double dy = (gram(cd(0, step)) - gram(cd(0, -step))) / (2 * step);
    cd fd = 0.5 * (dx - kI * dy);
    cd an = pair_l2(rep.lie10, rep.f) + pair_l2(rep.f, rep.lie01);
    return {fd, an};
}

}  // namespace torlab
