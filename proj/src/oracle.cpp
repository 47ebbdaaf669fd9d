#include "torlab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace torlab {

ThetaFrame theta_frame(cd t, int d, const Fiber& F) {
    if (t.imag() <= 0) throw Error(Err::NonPositivePeriod, "Im t must be positive");
    if (d < 0) throw Error(Err::Precondition, "degree must be non-negative");
    ThetaFrame th;
    th.t = t;
    th.d = d;
    int K = F.K;
    if (F.xs.empty()) throw Error(Err::DiscMismatch, "theta frame needs a grid fiber");
    if (d == 0) {
        th.g.push_back(VecC::Ones(K));
        return th;
    }
    // terms decay like exp(−π d Im t (m+y)²); stop below 1e-16
    double Y = t.imag();
    int R = static_cast<int>(std::ceil(std::sqrt(16 * std::log(10.0) / (kPi * d * Y)))) + 2;
    for (int j = 0; j < d; ++j) {
        VecC g = VecC::Zero(K);
        for (int i = 0; i < K; ++i) {
            double x = F.xs[i], y = F.ys[i];
            cd s = 0;
            for (int m0 = -R; m0 <= R; ++m0) {
                double m = double(j) / d + m0;
                s += std::exp(kI * kPi * double(d) * t * (m + y) * (m + y) + 2.0 * kI * kPi * double(d) * x * m);
            }
            g(i) = s;
        }
        th.g.push_back(g);
    }
    return th;
}

std::vector<double> theta_dbar_residual(const ThetaFrame& th, const Fiber& F) {
    std::vector<double> out;
    double Y = F.torus.Y(0, 0);
    for (const auto& g : th.g) {
        // compare ‖∂̄g‖ with the size of one derivative of g, √(2πd/Y)·‖g‖ (Landau scale)
        double scale = std::sqrt(2 * kPi * std::max(th.d, 1) / Y);
        out.push_back((F.dzbar[0] * g).norm() / (scale * g.norm()));
    }
    return out;
}

MatC theta_gram(const ThetaFrame& th, const Fiber& F) {
    int d = th.g.size();
    double Y = th.t.imag();
    MatC G(d, d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) G(k, j) = 2 * Y * F.weight * th.g[k].dot(th.g[j]);
    return G;
}

MatC fd_chern_curvature_H(const FiberContext& ctx, double step) {
    const auto& F = *ctx.fiber;
    if (ctx.n() != 1) throw Error(Err::UnsupportedDimension, "oracle frames exist for n=1");
    if (step <= 0) throw Error(Err::StepTooSmall, "step must be positive");
    int d = F.bundle.flat() ? 0 : F.bundle.degree;
    if (F.bundle.flat() && !F.bundle.chi.isZero(0.0))
        throw Error(Err::Precondition, "oracle frame only for the trivial flat bundle");
    // the constant frame of the trivial bundle has Gram 2 Im Ω(t')
    auto gram_at = [&](cd tp) -> MatC {
        cd om = ctx.family.period(tp)(0, 0);
        if (d == 0) return MatC::Constant(1, 1, 2 * om.imag());
        return theta_gram(theta_frame(om, d, F), F);
    };
    MatC G[3][3];
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            G[i + 1][j + 1] = gram_at(ctx.t + cd(i * step, j * step));
            if (!G[i + 1][j + 1].allFinite()) throw Error(Err::StencilQuadratureFailure, "non-finite Gram");
        }
    MatC H = G[1][1];
    Eigen::SelfAdjointEigenSolver<MatC> es(herm(H));
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
        throw Error(Err::StencilQuadratureFailure, "frame Gram singular");
    MatC Hx = (G[2][1] - G[0][1]) / (2 * step);
    MatC Hy = (G[1][2] - G[1][0]) / (2 * step);
    MatC Hxx = (G[2][1] - 2 * H + G[0][1]) / (step * step);
    MatC Hyy = (G[1][2] - 2 * H + G[1][0]) / (step * step);
    MatC dH = 0.5 * (Hx - kI * Hy), dbH = 0.5 * (Hx + kI * Hy), ddbH = 0.25 * (Hxx + Hyy);
    MatC Hi = H.inverse();
    // K = −∂_t̄(H⁻¹∂_t H)
    MatC Kc = -Hi * ddbH + Hi * dbH * Hi * dH;

    // frame in the orthonormal harmonic basis of the context
    MatC Cm;
    int r = ctx.basis.size();
    if (d == 0) {
        Cm = MatC(r, 1);
        FormSection s(ctx.basis[0].space, VecC::Zero(ctx.basis[0].coeffs.size()));
        // constant (1,0)-form dz in the orthonormal frame
        double Cinv = 1.0 / std::sqrt(F.torus.kaehler(0, 0).real());
        if (F.disc.kind == DiscKind::Grid)
            s.coeffs.setConstant(Cinv);
        else
            s.coeffs(F.mode_index({0, 0})) = Cinv;
        for (int a = 0; a < r; ++a) Cm(a, 0) = pair_l2(s, ctx.basis[a]);
    } else {
        ThetaFrame th = theta_frame(ctx.family.period(ctx.t)(0, 0), d, F);
        double Cinv = 1.0 / std::sqrt(F.torus.kaehler(0, 0).real());
        Cm = MatC(r, d);
        for (int j = 0; j < d; ++j) {
            FormSection s(ctx.basis[0].space, Cinv * th.g[j]);
            for (int a = 0; a < r; ++a) Cm(a, j) = pair_l2(s, ctx.basis[a]);
        }
    }
    if (Cm.rows() != Cm.cols()) throw Error(Err::StencilQuadratureFailure, "frame and harmonic basis sizes differ");
    MatC M = Cm * Kc * Cm.inverse();
    return herm(M);
}

namespace {

// symbol of ∂_{z̄} on the mode with real frequencies (k+a, l+b), from [∂_x;∂_y] = J [∂_z;∂_z̄]
VecC dzbar_symbol(const MatC& Om, const VecR& kx, const VecR& ly) {
    int n = Om.rows();
    MatC J = MatC::Zero(2 * n, 2 * n);
    J.topLeftCorner(n, n).setIdentity();
    J.topRightCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = Om.transpose();
    J.bottomRightCorner(n, n) = Om.conjugate().transpose();
    VecC rhs(2 * n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = 2.0 * kPi * kI * kx(i);
        rhs(n + i) = 2.0 * kPi * kI * ly(i);
    }
    VecC s = J.fullPivLu().solve(rhs);
    return s.tail(n);
}

int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

VecR exact_flat_spectrum(const LatticeTorus& T, const VecR& chi, int p, int q, int M) {
    int n = T.n;
    int mult = binom(n, p) * binom(n, q);
    MatC Hinv = T.kaehler.inverse();
    int B = 2 * M + 1, tot = 1;
    for (int i = 0; i < 2 * n; ++i) tot *= B;
    std::vector<double> ev;
    ev.reserve(tot * mult);
    for (int idx = 0; idx < tot; ++idx) {
        VecR kx(n), ly(n);
        int r = idx;
        for (int i = 2 * n - 1; i >= 0; --i) {
            int v = r % B - M;
            r /= B;
            if (i < n)
                kx(i) = v + chi(i);
            else
                ly(i - n) = v + chi(i);
        }
        VecC mu = dzbar_symbol(T.period, kx, ly);
        double lam = (mu.transpose() * Hinv * mu.conjugate())(0, 0).real();
        for (int c = 0; c < mult; ++c) ev.push_back(lam);
    }
    std::sort(ev.begin(), ev.end());
    return Eigen::Map<VecR>(ev.data(), ev.size());
}

int kernel_count(const VecR& e, double rank_tol, double gap) {
    if (e.size() == 0) return 0;
    double mx = e.maxCoeff();
    double cut = rank_tol * mx;
    int k = 0;
    while (k < e.size() && e(k) <= cut) ++k;
    if (k == 0 || k == e.size()) return k;
    if (e(k) > gap * std::max(std::abs(e(k - 1)), 1e-300)) return k;
    // no clean gap at the cut: take the widest gap among the small values
    int best = 0;
    double br = 0;
    for (int i = 1; i <= k; ++i) {
        double ratio = e(i) / std::max(std::abs(e(i - 1)), 1e-300);
        if (ratio > br) {
            br = ratio;
            best = i;
        }
    }
    return best;
}

std::vector<ScanRow> rank_scan(const FamilySpec& fam, const std::vector<cd>& ts, Disc disc, const HodgeOptions& opt) {
    if (fam.kind != BundleKind::Flat) throw Error(Err::Precondition, "rank scan needs a flat-bundle family");
    std::vector<ScanRow> rows;
    int n = fam.n;
    for (cd t : ts) {
        LatticeTorus T = fam.torus_at(t);
        BundleData B = fam.bundle_at(t);
        auto F = make_fiber(T, B, disc);
        auto P = build_hodge(make_space(F, n, 0), opt);
        ScanRow r;
        r.t = t;
        r.rank = P.harmonic_dim();
        r.rank_exact = kernel_count(exact_flat_spectrum(T, B.chi, n, 0, disc.size), opt.rank_tol);
        r.lambda1 = smallest_positive_eigenvalue(P);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace torlab
