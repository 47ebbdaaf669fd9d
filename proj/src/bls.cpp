#include "torlab/bls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace torlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

MatC random_complex(int r, int c, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    MatC A(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) A(i, j) = cd(nd(rng), nd(rng)) / std::sqrt(2.0);
    return A;
}

struct Deriv {
    MatC f, dt, dtb, ddb;  // value, ∂_t, ∂_t̄, ∂_t∂_t̄
};

// 3×3 stencil derivatives of a matrix function of t
Deriv stencil(const std::function<MatC(cd)>& f, cd t, double s) {
    MatC c = f(t), xp = f(t + s), xm = f(t - s), yp = f(t + cd(0, s)), ym = f(t - cd(0, s));
    Deriv d;
    d.f = c;
    MatC fx = (xp - xm) / (2 * s), fy = (yp - ym) / (2 * s);
    d.dt = 0.5 * (fx - kI * fy);
    d.dtb = 0.5 * (fx + kI * fy);
    d.ddb = 0.25 * ((xp - 2 * c + xm) + (yp - 2 * c + ym)) / (s * s);
    return d;
}

void check_step(const MatC& h, double step) {
    // roundoff of a second difference relative to the data
    if (step <= 0 || 4 * kEps / (step * step) > 1e-6)
        throw Error(Err::StepTooSmall, "second differences dominated by roundoff");
    if (!h.allFinite()) throw Error(Err::StepTooSmall, "non-finite samples");
}

int numerical_rank(const MatC& V) {
    if (V.size() == 0) return 0;
    Eigen::JacobiSVD<MatC> svd(V);
    auto s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-8 * s(0)) ++r;
    return r;
}

}  // namespace

MatC FiniteBLSField::projector(cd t) const {
    MatC h = metric(t);
    if (!frame) return MatC::Identity(ambient_dim, ambient_dim);
    MatC V = frame(t);
    MatC G = V.adjoint() * h * V;
    return V * G.inverse() * V.adjoint() * h;
}

MatC chern_curvature_fd(const std::function<MatC(cd)>& h, cd t, double step) {
    Deriv d = stencil(h, t, step);
    check_step(d.f, step);
    MatC hi = d.f.inverse();
    return -hi * d.ddb + hi * d.dtb * hi * d.dt;
}

GaussGriffithsResult gauss_griffiths_check(const FiniteBLSField& F, cd t, double step) {
    int N = F.ambient_dim;
    std::function<MatC(cd)> frame = F.frame ? F.frame : [N](cd) { return MatC(MatC::Identity(N, N)); };
    int r0 = numerical_rank(frame(t));
    for (cd s : {cd(step, 0), cd(-step, 0), cd(0, step), cd(0, -step)})
        if (numerical_rank(frame(t + s)) != r0) throw Error(Err::RankJump, "subfield rank changes inside the stencil");
    MatC h = F.metric(t);
    MatC V = frame(t);
    auto gram = [&](cd s) -> MatC {
        MatC Vs = frame(s);
        return Vs.adjoint() * F.metric(s) * Vs;
    };
    MatC G = gram(t);
    MatC KG = chern_curvature_fd(gram, t, step);
    MatC Kh = chern_curvature_fd(F.metric, t, step);
    Deriv dh = stencil(F.metric, t, step);
    Deriv dV = stencil(frame, t, step);
    MatC DV = dV.dt + h.inverse() * dh.dt * V;
    MatC Pi = V * G.inverse() * V.adjoint() * h;
    MatC II = (MatC::Identity(N, N) - Pi) * DV;
    GaussGriffithsResult R;
    R.theta_H = G * KG;
    R.theta_L_on_H = V.adjoint() * h * Kh * V;
    R.sff = II.adjoint() * h * II;
    R.residual = (R.theta_H - (R.theta_L_on_H - R.sff)).norm();
    return R;
}

double curvature_hermitian_defect(const FiniteBLSField& F, cd t, double step) {
    MatC K = chern_curvature_fd(F.metric, t, step);
    MatC hK = F.metric(t) * K;
    return (hK - hK.adjoint()).norm();
}

double metric_compatibility_defect(const FiniteBLSField& F, cd t, double step, std::mt19937& rng) {
    int N = F.ambient_dim;
    MatC f = random_complex(N, 2, rng);
    VecC f1 = f.col(0), f2 = f.col(1);
    auto hval = [&](cd s) { return MatC::Constant(1, 1, f2.dot(F.metric(s) * f1)); };
    // derivative of the scalar at a different step than the connection
    Deriv ds = stencil(hval, t, 0.5 * step);
    Deriv dh = stencil(F.metric, t, step);
    MatC h = dh.f;
    VecC nab = h.inverse() * dh.dt * f1;  // ∇_t f₁ for a constant section; ∇_t̄ f₂ = 0
    cd rhs = f2.dot(h * nab);
    return std::abs(ds.dt(0, 0) - rhs);
}

MatC schur_complement(const HermitianFormOnTensor& A) {
    int r = A.r, n1 = A.m1 * r, n2 = A.m2 * r;
    MatC J11 = A.Phi.topLeftCorner(n1, n1);
    if (n2 == 0) return herm(J11);
    MatC J12 = A.Phi.topRightCorner(n1, n2);
    MatC J21 = A.Phi.bottomLeftCorner(n2, n1);
    MatC J22 = A.Phi.bottomRightCorner(n2, n2);
    if (min_eig(J22) < 1e-12) throw Error(Err::SingularBlock, "M2 block not positive definite");
    return herm(J11 - J12 * J22.ldlt().solve(J21));
}

namespace {

// minimum of the form over unit tensors Σ_l a_l ⊗ b_l with fixed orthonormal a's (columns of Q)
double min_given_left(const MatC& S, const MatC& Q, int r, VecC* bmin) {
    int m = Q.rows(), k = Q.cols();
    MatC Z = MatC::Zero(m * r, r * k);
    for (int l = 0; l < k; ++l)
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < r; ++a) Z(i * r + a, l * r + a) = Q(i, l);
    Eigen::SelfAdjointEigenSolver<MatC> es(herm(Z.adjoint() * S * Z));
    if (bmin) *bmin = Z * es.eigenvectors().col(0);
    return es.eigenvalues()(0);
}

// swap the tensor factors: index i*r + a -> a*m + i
MatC swap_factors(const MatC& S, int m, int r) {
    std::vector<int> perm(m * r);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < r; ++a) perm[a * m + i] = i * r + a;
    MatC T(m * r, m * r);
    for (int p = 0; p < m * r; ++p)
        for (int q = 0; q < m * r; ++q) T(p, q) = S(perm[p], perm[q]);
    return T;
}

MatC orthonormal_cols(const MatC& A) {
    Eigen::HouseholderQR<MatC> qr(A);
    return qr.householderQ() * MatC::Identity(A.rows(), A.cols());
}

}  // namespace

PositivityResult schur_complement_demailly(const HermitianFormOnTensor& A, int k, std::mt19937& rng, int restarts) {
    PositivityResult R;
    MatC S = schur_complement(A);
    int m = A.m1, r = A.r;
    // whiten the fiber metric
    Eigen::LLT<MatC> llt(herm(A.phi));
    MatC L = llt.matrixL();
    MatC Li = L.inverse();
    MatC W = MatC::Zero(m * r, m * r);
    for (int i = 0; i < m; ++i) W.block(i * r, i * r, r, r) = Li.adjoint();
    MatC Sw = herm(W.adjoint() * S * W);
    R.schur = S;
    double best = std::numeric_limits<double>::infinity();
    VecC wit;
    if (k >= std::min(m, r)) {
        Eigen::SelfAdjointEigenSolver<MatC> es(Sw);
        best = es.eigenvalues()(0);
        wit = es.eigenvectors().col(0);
    } else {
        MatC St = swap_factors(Sw, m, r);
        for (int it = 0; it < restarts; ++it) {
            MatC Q = orthonormal_cols(random_complex(m, k, rng));
            double val = 0, prev = std::numeric_limits<double>::infinity();
            VecC x;
            for (int sweep = 0; sweep < 200; ++sweep) {
                val = min_given_left(Sw, Q, r, &x);
                // right factor of x, then minimize over the left factor
                Eigen::Map<const MatC> X(x.data(), r, m);  // X(a,i) = x[i*r + a]
                Eigen::JacobiSVD<MatC> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
                MatC P = svd.matrixU().leftCols(k);
                VecC y;
                val = min_given_left(St, P, m, &y);
                Eigen::Map<const MatC> Yt(y.data(), m, r);  // Yt(i,a) = y[a*m + i]
                Eigen::JacobiSVD<MatC> svd2(Yt, Eigen::ComputeThinU | Eigen::ComputeThinV);
                Q = svd2.matrixU().leftCols(k);
                if (prev - val < 1e-14 * (1 + std::abs(val))) break;
                prev = val;
            }
            val = min_given_left(Sw, Q, r, &x);
            if (val < best) {
                best = val;
                wit = x;
            }
        }
    }
    R.min_value = best;
    R.witness = W * wit;
    R.is_k_positive = best > 1e-10 * std::max(1.0, S.norm());
    return R;
}

namespace {

// min over k-dim subspaces U of C^s (s = 2, 3) of λ_min(S restricted to U ⊗ C^r); S ordered as C^s ⊗ C^r
double grassmann_min(const MatC& S, int s, int r, int k) {
    auto value = [&](const std::vector<double>& p) {
        VecC u(s);
        if (s == 2) {
            u << std::cos(p[0]), std::exp(kI * p[1]) * std::sin(p[0]);
        } else {
            u << std::cos(p[0]), std::exp(kI * p[2]) * std::sin(p[0]) * std::cos(p[1]),
                std::exp(kI * p[3]) * std::sin(p[0]) * std::sin(p[1]);
        }
        MatC Q;
        if (k == 1) {
            Q = u;
        } else {
            // orthogonal complement of u
            Eigen::FullPivHouseholderQR<MatC> qr(u);
            MatC full = qr.matrixQ();
            Q = full.rightCols(s - 1);
        }
        return min_given_left(S, Q, r, nullptr);
    };
    int dims = (s == 2) ? 2 : 4;
    std::vector<int> npts = (s == 2) ? std::vector<int>{61, 120} : std::vector<int>{13, 13, 24, 24};
    std::vector<double> span = (s == 2) ? std::vector<double>{kPi / 2, 2 * kPi}
                                        : std::vector<double>{kPi / 2, kPi / 2, 2 * kPi, 2 * kPi};
    std::vector<double> best_p(dims);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(dims, 0);
    // keep a few of the best grid points and polish each
    std::vector<std::pair<double, std::vector<double>>> seeds;
    for (;;) {
        std::vector<double> p(dims);
        for (int d = 0; d < dims; ++d) {
            bool periodic = span[d] > 4;
            p[d] = periodic ? span[d] * idx[d] / npts[d] : span[d] * idx[d] / (npts[d] - 1);
        }
        double v = value(p);
        seeds.push_back({v, p});
        int d = 0;
        while (d < dims && ++idx[d] == npts[d]) idx[d++] = 0;
        if (d == dims) break;
    }
    std::partial_sort(seeds.begin(), seeds.begin() + std::min<size_t>(8, seeds.size()), seeds.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t sidx = 0; sidx < std::min<size_t>(8, seeds.size()); ++sidx) {
        auto p = seeds[sidx].second;
        double v = seeds[sidx].first;
        double h = 0.1;
        while (h > 1e-10) {
            bool improved = false;
            for (int d = 0; d < dims; ++d)
                for (double sg : {1.0, -1.0}) {
                    auto q = p;
                    q[d] += sg * h;
                    double w = value(q);
                    if (w < v) {
                        v = w;
                        p = q;
                        improved = true;
                    }
                }
            if (!improved) h *= 0.5;
        }
        if (v < best) {
            best = v;
            best_p = p;
        }
    }
    return best;
}

}  // namespace

double rank_k_min_bruteforce(const MatC& S, int m, int r, int k) {
    if (m * r > 9) throw Error(Err::Precondition, "brute-force oracle limited to m*r <= 9");
    if (k >= std::min(m, r)) return min_eig(S);
    if (m <= r) return grassmann_min(herm(S), m, r, k);
    return grassmann_min(herm(swap_factors(S, m, r)), r, m, k);
}

HermitianFormOnTensor random_nakano_positive(int m1, int m2, int r, double eps, std::mt19937& rng) {
    HermitianFormOnTensor A;
    A.m1 = m1;
    A.m2 = m2;
    A.r = r;
    int D = (m1 + m2) * r;
    MatC B = random_complex(D, D, rng);
    A.Phi = herm(B.adjoint() * B) + eps * MatC::Identity(D, D);
    A.phi = MatC::Identity(r, r);
    return A;
}

HermitianFormOnTensor random_indefinite(int m1, int m2, int r, std::mt19937& rng) {
    HermitianFormOnTensor A;
    A.m1 = m1;
    A.m2 = m2;
    A.r = r;
    int D = (m1 + m2) * r, n1 = m1 * r;
    MatC B = random_complex(D, D, rng);
    MatC P = herm(B.adjoint() * B) + 0.1 * MatC::Identity(D, D);
    // indefinite top-left block, positive M₂ block
    MatC C = random_complex(n1, n1, rng);
    P.topLeftCorner(n1, n1) = herm(C + C.adjoint()) + 0.5 * MatC::Identity(n1, n1);
    A.Phi = herm(P);
    if (m2 > 0 && min_eig(A.Phi.bottomRightCorner(m2 * r, m2 * r)) < 1e-3)
        A.Phi.bottomRightCorner(m2 * r, m2 * r) += MatC::Identity(m2 * r, m2 * r);
    A.phi = MatC::Identity(r, r);
    return A;
}

HermitianFormOnTensor griffiths_not_nakano(double lambda) {
    HermitianFormOnTensor A;
    A.m1 = 2;
    A.m2 = 0;
    A.r = 2;
    VecC psi = VecC::Zero(4);
    psi(0 * 2 + 1) = 1.0 / std::sqrt(2.0);
    psi(1 * 2 + 0) = -1.0 / std::sqrt(2.0);
    A.Phi = MatC::Identity(4, 4) - lambda * psi * psi.adjoint();
    A.phi = MatC::Identity(2, 2);
    return A;
}

DemaillyCase run_demailly_case(const std::string& kind, const HermitianFormOnTensor& A, int k, std::mt19937& rng,
                               int restarts) {
    DemaillyCase c;
    c.kind = kind;
    c.m1 = A.m1;
    c.m2 = A.m2;
    c.r = A.r;
    c.k = k;
    auto P = schur_complement_demailly(A, k, rng, restarts);
    c.als_min = P.min_value;
    c.als_positive = P.is_k_positive;
    // the oracle sees the whitened Schur complement
    Eigen::LLT<MatC> llt(herm(A.phi));
    MatC Li = MatC(llt.matrixL()).inverse();
    MatC W = MatC::Zero(A.m1 * A.r, A.m1 * A.r);
    for (int i = 0; i < A.m1; ++i) W.block(i * A.r, i * A.r, A.r, A.r) = Li.adjoint();
    c.oracle_min = rank_k_min_bruteforce(herm(W.adjoint() * P.schur * W), A.m1, A.r, k);
    c.oracle_positive = c.oracle_min > 1e-10 * std::max(1.0, P.schur.norm());
    return c;
}

std::vector<DemaillyCase> demailly_battery(int count, std::mt19937& rng, int restarts) {
    static const int shapes[][2] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 3}};
    std::vector<DemaillyCase> out;
    for (int i = 0; i < count; ++i) {
        int m1 = shapes[i % 7][0], r = shapes[i % 7][1];
        int k = 1 + (i / 7) % 2;
        if (k >= std::min(m1, r)) k = 1;
        int m2 = 1 + (i / 14) % 2;
        std::string kind;
        HermitianFormOnTensor A;
        switch (i % 3) {
            case 0:
                kind = "nakano-positive";
                A = random_nakano_positive(m1, m2, r, 0.1, rng);
                break;
            case 1:
                kind = "indefinite";
                A = random_indefinite(m1, m2, r, rng);
                break;
            default: {
                // positive Schur complement lowered along one random direction
                kind = "shifted";
                A = random_indefinite(m1, m2, r, rng);
                int n1 = m1 * r;
                double mn = min_eig(schur_complement(A));
                A.Phi.topLeftCorner(n1, n1) += (0.3 - mn) * MatC::Identity(n1, n1);
                VecC b = random_complex(n1, 1, rng);
                b.normalize();
                A.Phi.topLeftCorner(n1, n1) -= b * b.adjoint();
            }
        }
        out.push_back(run_demailly_case(kind, A, k, rng, restarts));
    }
    return out;
}

FiniteBLSField field_identity(int N) {
    FiniteBLSField F;
    F.ambient_dim = N;
    F.metric = [N](cd) { return MatC(MatC::Identity(N, N)); };
    return F;
}

FiniteBLSField field_exp_scalar(int N, double a) {
    FiniteBLSField F;
    F.ambient_dim = N;
    F.metric = [N, a](cd t) { return MatC(std::exp(a * std::norm(t)) * MatC::Identity(N, N)); };
    return F;
}

FiniteBLSField field_exp_diag(double a, double b) {
    FiniteBLSField F;
    F.ambient_dim = 2;
    F.metric = [a, b](cd t) {
        MatC h = MatC::Zero(2, 2);
        h(0, 0) = std::exp(a * std::norm(t));
        h(1, 1) = std::exp(b * std::norm(t));
        return h;
    };
    return F;
}

FiniteBLSField field_rotating_line(double a, double b) {
    FiniteBLSField F = field_exp_scalar(2, 1.0);
    F.frame = [a, b](cd t) {
        MatC V(2, 1);
        V << 1.0, a * t + b * t * t;
        return V;
    };
    return F;
}

FiniteBLSField field_random(int N, int rank, std::mt19937& rng) {
    // h(t) = B(t)^H B(t) + Id with B holomorphic-polynomial in t, plus e^{|t|²} weight
    // unit-scale coefficients so the FD truncation error is comparable across N
    double sc = 1.0 / std::sqrt(double(N));
    MatC B0 = sc * random_complex(N, N, rng), B1 = sc * random_complex(N, N, rng),
         V0 = sc * random_complex(N, rank, rng), V1 = sc * random_complex(N, rank, rng);
    FiniteBLSField F;
    F.ambient_dim = N;
    F.metric = [=](cd t) {
        MatC B = B0 + 0.3 * t * B1 + 0.2 * std::conj(t) * B1.adjoint();
        return MatC(herm(B.adjoint() * B) + MatC::Identity(N, N) * std::exp(std::norm(t)));
    };
    F.frame = [=](cd t) { return MatC(V0 + t * V1); };
    return F;
}

}  // namespace torlab
