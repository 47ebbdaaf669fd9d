#include "torlab/torus.hpp"

#include <cmath>

namespace torlab {

double LatticeTorus::volume() const {
    // ω^n/n! = 2^n det H dLeb, and the fundamental domain has Lebesgue volume det Y
    return std::pow(2.0, n) * kaehler.determinant().real() * Y.determinant();
}

LatticeTorus make_torus(int n, const MatC& Omega, std::optional<MatC> kaehler, bool normalize) {
    if (n < 1 || n > 2) throw Error(Err::UnsupportedDimension, "n must be 1 or 2");
    if (Omega.rows() != n || Omega.cols() != n) throw Error(Err::ShapeMismatch, "period matrix shape");
    LatticeTorus T;
    T.n = n;
    T.period = Omega;
    T.Y = Omega.imag();
    if (n == 2) {
        if ((Omega - Omega.transpose()).norm() > 1e-12 * (1 + Omega.norm()))
            throw Error(Err::NonPositivePeriod, "period matrix must be symmetric");
        T.Y = 0.5 * (T.Y + T.Y.transpose());
    }
    Eigen::SelfAdjointEigenSolver<MatR> ey(T.Y);
    if (ey.eigenvalues().minCoeff() <= 1e-12) throw Error(Err::NonPositivePeriod, "Im Ω not positive definite");
    T.Yinv = T.Y.inverse();
    MatC H = kaehler ? *kaehler : MatC(0.5 * T.Yinv.cast<cd>());
    if ((H - H.adjoint()).norm() > 1e-12 * H.norm()) throw Error(Err::Precondition, "kaehler matrix not Hermitian");
    H = herm(H);
    Eigen::SelfAdjointEigenSolver<MatC> eh(H);
    if (eh.eigenvalues().minCoeff() <= 0) throw Error(Err::Precondition, "kaehler matrix not positive");
    T.kaehler = H;
    T.raw_volume = T.volume();
    if (normalize) T.kaehler = H / std::pow(T.raw_volume, 1.0 / n);
    eh.compute(T.kaehler);
    MatC S = eh.eigenvectors() * eh.eigenvalues().cwiseSqrt().asDiagonal() * eh.eigenvectors().adjoint();
    T.C = S.transpose();
    T.Cinv = T.C.inverse();
    return T;
}

cd TrigField::eval(const double* x, const double* y) const {
    cd s = 0;
    for (const auto& t : terms) {
        double ph = 0;
        for (int j = 0; j < n; ++j) ph += t.k[j] * x[j] + t.l[j] * y[j];
        s += t.c * std::exp(2.0 * kPi * kI * ph);
    }
    return s;
}

TrigField TrigField::dzbar(const LatticeTorus& T, int a) const {
    // ∂_{z̄_a} = (i/2) Σ_b Yinv_ab (∂_{y_b} − Σ_c Ω_bc ∂_{x_c})
    TrigField out{n, {}};
    for (const auto& t : terms) {
        cd m = 0;
        for (int b = 0; b < n; ++b) {
            cd ok = 0;
            for (int c = 0; c < n; ++c) ok += T.period(b, c) * double(t.k[c]);
            m += T.Yinv(a, b) * (double(t.l[b]) - ok);
        }
        out.terms.push_back({t.k, t.l, t.c * (-kPi) * m});
    }
    return out;
}

TrigField TrigField::dz(const LatticeTorus& T, int a) const {
    TrigField out{n, {}};
    for (const auto& t : terms) {
        cd m = 0;
        for (int b = 0; b < n; ++b) {
            cd ok = 0;
            for (int c = 0; c < n; ++c) ok += std::conj(T.period(b, c)) * double(t.k[c]);
            m += T.Yinv(a, b) * (double(t.l[b]) - ok);
        }
        out.terms.push_back({t.k, t.l, t.c * kPi * m});
    }
    return out;
}

TrigField TrigField::conj() const {
    TrigField out{n, {}};
    for (const auto& t : terms) {
        std::vector<int> k = t.k, l = t.l;
        for (auto& v : k) v = -v;
        for (auto& v : l) v = -v;
        out.terms.push_back({k, l, std::conj(t.c)});
    }
    return out;
}

TrigField TrigField::scaled(cd s) const {
    TrigField out = *this;
    for (auto& t : out.terms) t.c *= s;
    return out;
}

int TrigField::max_mode() const {
    int m = 0;
    for (const auto& t : terms)
        for (int j = 0; j < n; ++j) m = std::max({m, std::abs(t.k[j]), std::abs(t.l[j])});
    return m;
}

TrigField real_trig(int n, const std::vector<std::vector<int>>& kl, const std::vector<double>& a,
                    const std::vector<double>& b) {
    TrigField f{n, {}};
    for (size_t i = 0; i < kl.size(); ++i) {
        std::vector<int> k(kl[i].begin(), kl[i].begin() + n), l(kl[i].begin() + n, kl[i].end());
        std::vector<int> mk = k, ml = l;
        for (auto& v : mk) v = -v;
        for (auto& v : ml) v = -v;
        // a cos θ + b sin θ = ½(a − ib) e^{iθ} + ½(a + ib) e^{−iθ}
        f.terms.push_back({k, l, 0.5 * cd(a[i], -b[i])});
        f.terms.push_back({mk, ml, 0.5 * cd(a[i], b[i])});
    }
    return f;
}

BundleData make_flat_bundle(const LatticeTorus& T, const VecR& chi) {
    if (chi.size() != 2 * T.n) throw Error(Err::ShapeMismatch, "character length must be 2n");
    BundleData B;
    B.kind = BundleKind::Flat;
    B.chi = chi;
    for (int i = 0; i < chi.size(); ++i)
        if (chi(i) < 0 || chi(i) >= 1) throw Error(Err::Precondition, "character must lie in [0,1)");
    B.curvature = MatC::Zero(T.n, T.n);
    return B;
}

BundleData make_positive_bundle(const LatticeTorus& T, int d, const TrigField& psi) {
    if (T.n != 1) throw Error(Err::UnsupportedDimension, "positive bundles only on n=1 fibers");
    if (d < 1) throw Error(Err::Precondition, "degree must be positive");
    BundleData B;
    B.kind = BundleKind::Positive;
    B.degree = d;
    B.chi = VecR::Zero(2);
    B.psi = psi;
    B.curvature = MatC::Constant(1, 1, kPi * d / T.Y(0, 0));
    return B;
}

double positive_curvature_at(const LatticeTorus& T, const BundleData& B, double x, double y) {
    double v = B.curvature(0, 0).real();
    if (!B.psi.empty()) v += B.psi.dzbar(T, 0).dz(T, 0).eval(&x, &y).real();
    return v;
}

BundleData FamilySpec::bundle_at(cd s) const {
    LatticeTorus T = torus_at(s);
    if (kind == BundleKind::Positive) return make_positive_bundle(T, degree);
    return make_flat_bundle(T, character(s));
}

FamilySpec elliptic_family(cd t, BundleKind kind, int degree, const VecR& chi) {
    FamilySpec F;
    F.id = "elliptic";
    F.n = 1;
    F.t = t;
    F.period = [](cd s) { return MatC::Constant(1, 1, s); };
    F.dperiod = [](cd) { return MatC::Constant(1, 1, 1.0); };
    F.kind = kind;
    F.degree = degree;
    F.character = [chi](cd) { return chi; };
    return F;
}

FamilySpec constant_family(cd t, cd omega0, BundleKind kind, int degree, const VecR& chi) {
    FamilySpec F = elliptic_family(t, kind, degree, chi);
    F.id = "constant";
    F.period = [omega0](cd) { return MatC::Constant(1, 1, omega0); };
    F.dperiod = [](cd) { return MatC::Zero(1, 1); };
    return F;
}

namespace {
double wrap01(double v) {
    double r = v - std::floor(v);
    if (std::abs(r - std::round(r)) < 1e-9) r = 0.0;  // snap near-integers
    if (r >= 1.0) r = 0.0;
    return r;
}
}  // namespace

VecR jumping_character(cd t) {
    // i = x + y t with real x, y
    double y = 1.0 / t.imag();
    double x = -t.real() / t.imag();
    VecR chi(2);
    chi << wrap01(y), wrap01(-x);
    return chi;
}

bool on_jump_locus(cd t, double tol) {
    double y = 1.0 / t.imag();
    double x = -t.real() / t.imag();
    return std::abs(x - std::round(x)) < tol && std::abs(y - std::round(y)) < tol;
}

FamilySpec jumping_family(cd t) {
    if (t.imag() <= 0) throw Error(Err::Precondition, "Im t must be positive");
    FamilySpec F = elliptic_family(t, BundleKind::Flat, 0);
    F.id = "jumping";
    F.character = [](cd s) { return jumping_character(s); };
    return F;
}

FamilySpec siegel_family(cd t, cd eps, cd w0, cd a, const VecR& chi) {
    FamilySpec F;
    F.id = "siegel-diagonal";
    F.n = 2;
    F.t = t;
    F.period = [eps, w0, a](cd s) {
        MatC O(2, 2);
        O << s, eps, eps, w0 + a * s;
        return O;
    };
    F.dperiod = [a](cd) {
        MatC O = MatC::Zero(2, 2);
        O(0, 0) = 1.0;
        O(1, 1) = a;
        return O;
    };
    F.kind = BundleKind::Flat;
    F.character = [chi](cd) { return chi; };
    return F;
}

}  // namespace torlab
