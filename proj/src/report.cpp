#include "torlab/report.hpp"

#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "torlab/bls.hpp"
#include "torlab/curvature.hpp"
#include "torlab/oracle.hpp"

namespace torlab {

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const MatC& M) {
    json data = json::array();
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) data.push_back(complex_json(M(i, j)));
    return {{"rows", M.rows()}, {"cols", M.cols()}, {"data", data}};
}

namespace {

json check_json(const IdentityCheck& c) {
    return {{"name", c.name}, {"bidegree", {c.p, c.q}}, {"residual", c.residual}, {"tol", c.tol}, {"pass", c.pass()}};
}

json header(const std::string& cmd, const ExperimentConfig& c) {
    return {{"command", cmd}, {"config", config_json(c)}, {"tolerances", tolerances_json(c.tol)}, {"seed", c.seed}};
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double rel(const MatC& a, const MatC& b) {
    double s = b.norm();
    return s > 0 ? (a - b).norm() / s : (a - b).norm();
}

json vec_json(const std::vector<double>& v) { return json(v); }

}  // namespace

RunResult run_hodge_check(const ExperimentConfig& c, bool dump_spectrum) {
    RunResult out;
    FamilySpec fam = c.family_spec();
    auto F = make_fiber(fam.torus_at(c.t), fam.bundle_at(c.t), c.disc());
    HodgeOptions opt = c.hodge_options();
    std::vector<IdentityCheck> checks = identity_suite(F, c.tol.identity);
    json dims = json::object(), lam = json::object();
    std::ostringstream spec;
    if (dump_spectrum) spec << "bidegree,index,eigenvalue\n";
    int n = F->n;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            auto P = build_hodge(make_space(F, p, q), opt);
            std::string key = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
            dims[key] = P.harmonic_dim();
            try {
                lam[key] = smallest_positive_eigenvalue(P);
            } catch (const Error&) {
                lam[key] = nullptr;
            }
            std::mt19937 rng(opt.seed + 31u * (p * (n + 1) + q));
            std::normal_distribution<double> nd;
            VecC x(P.space.dim);
            for (int i = 0; i < x.size(); ++i) x(i) = cd(nd(rng), nd(rng));
            VecC r = x - P.project(x) - P.laplacian.data * P.green(x);
            checks.push_back({"hodge_decomposition", p, q, r.norm() / x.norm(), c.tol.identity.decomposition});
            if (q >= 1) {
                auto m = minimal_norm_check(P, opt.seed + 1u, c.tol.minimal_norm);
                checks.push_back(m);
            }
            if (F->disc.kind == DiscKind::Spectral) {
                checks.push_back(spectrum_check(P, c.tol.spectrum));
                checks.push_back(kernel_check(P));
            }
            if (dump_spectrum)
                for (int i = 0; i < P.eigenvalues.size(); ++i)
                    spec << "\"" << key << "\"," << i << "," << fmt(P.eigenvalues(i)) << "\n";
        }
    json arr = json::array();
    for (const auto& ch : checks) {
        arr.push_back(check_json(ch));
        out.pass = out.pass && ch.pass();
    }
    out.report = header("hodge-check", c);
    out.report["checks"] = arr;
    out.report["harmonic_dims"] = dims;
    out.report["lambda1"] = lam;
    out.report["spectrum_complete"] = F->disc.kind == DiscKind::Spectral;
    out.report["pass"] = out.pass;
    out.spectrum_csv = spec.str();
    return out;
}

RunResult run_curvature(const ExperimentConfig& c) {
    RunResult out;
    FamilySpec fam = c.family_spec();
    if (fam.n != 1) throw Error(Err::UnsupportedDimension, "curvature pipeline implemented for n = 1");
    auto ctx = make_context(fam, c.t, c.disc(), c.hodge_options());
    auto lift = trivialization_lift(ctx);
    auto R = curvature_H(ctx, lift, c.sigma, c.tau);
    json j = header("curvature", c);
    j["t"] = complex_json(R.t);
    j["sigma"] = complex_json(R.sigma);
    j["tau"] = complex_json(R.tau);
    j["rank"] = R.rank;
    j["near_jump"] = R.near_jump;
    json verdict = json::object();
    bool full = R.rank > 0 && fam.id != "jumping";
    if (full) {
        const auto& T = c.tol;
        j["gram"] = matrix_json(R.gram);
        j["term_theta_h"] = matrix_json(R.term_theta_h);
        j["term_kappa"] = matrix_json(R.term_kappa);
        j["term_sff"] = matrix_json(R.term_sff);
        j["theta_H"] = matrix_json(R.theta_H);
        j["theta_H_bly"] = matrix_json(R.theta_H_bly);
        j["nakano_min_eig"] = R.nakano_min_eig;
        j["sff_min_eig"] = R.sff_min_eig;
        j["residual_routes"] = R.residual_routes;
        j["sff_routes"] = R.sff_routes;
        j["hermitian_defect"] = R.hermitian_defect;
        j["representatives"] = {{"a", vec_json(R.res_a)},
                                {"b", vec_json(R.res_b)},
                                {"c", vec_json(R.res_c)},
                                {"admissibility", vec_json(R.admissibility)},
                                {"kernel_overlap", vec_json(R.kernel_overlap)}};
        double rep = 0;
        for (size_t i = 0; i < R.res_a.size(); ++i) rep = std::max({rep, R.res_a[i], R.res_b[i], R.res_c[i]});
        verdict["nakano"] = R.nakano_min_eig >= -T.nakano_floor;
        verdict["sff_psd"] = R.sff_min_eig >= -T.sff_psd_floor;
        verdict["routes"] = R.residual_routes <= T.routes;
        verdict["sff_routes"] = R.sff_routes <= T.sff_routes;
        verdict["representatives"] = rep <= T.representatives;
        bool trivial_char = ctx.fiber->bundle.flat() ? ctx.fiber->bundle.chi.isZero(0.0) : true;
        if (c.fd_oracle && trivial_char) {
            MatC K = fd_chern_curvature_H(ctx, c.fd_step) * (c.sigma * std::conj(c.tau));
            double e3 = rel(R.theta_H, K), eb = rel(R.theta_H_bly, K);
            j["oracle"] = {{"step", c.fd_step}, {"theta_H", matrix_json(K)}, {"three_term_rel", e3}, {"bly_rel", eb}};
            verdict["oracle"] = std::max(e3, eb) <= T.oracle;
        }
        if (c.perturb) {
            std::mt19937 rng(static_cast<unsigned>(c.seed));
            auto l2 = trivialization_lift(ctx, {random_trig(1, c.pert_max_mode, c.pert_amplitude, rng)});
            double ind = lift_independence_check(ctx, lift, l2, c.sigma, c.tau);
            j["lift_independence"] = ind;
            verdict["lift_independence"] = ind <= T.lift_independence;
        }
    }
    for (auto it = verdict.begin(); it != verdict.end(); ++it) out.pass = out.pass && it.value().get<bool>();
    j["verdict"] = verdict;
    j["pass"] = out.pass;
    out.report = j;
    return out;
}

RunResult run_scan_rank(const ExperimentConfig& c, int threads) {
    RunResult out;
    FamilySpec fam = c.family_spec();
    if (fam.kind != BundleKind::Flat) throw Error(Err::ConfigInvalid, "scan-rank needs a flat-bundle family");
    int np = c.scan_points;
    std::vector<cd> ts(np);
    for (int k = 0; k < np; ++k) ts[k] = np == 1 ? c.scan_start : c.scan_start + (c.scan_end - c.scan_start) * (double(k) / (np - 1));
    std::vector<ScanRow> rows(np);
    int nt = std::max(1, std::min(threads, np));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    HodgeOptions opt = c.hodge_options();
    Disc d = c.disc();
    for (int w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int k = w; k < np; k += nt) rows[k] = rank_scan(fam, {ts[k]}, d, opt)[0];
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    std::ostringstream csv;
    csv << "t_re,t_im,rank,lambda1\n";
    json jump = json::array();
    int mismatches = 0;
    for (int k = 0; k < np; ++k) {
        const auto& r = rows[k];
        csv << fmt(r.t.real()) << "," << fmt(r.t.imag()) << "," << r.rank << "," << fmt(r.lambda1) << "\n";
        if (r.rank > 0) jump.push_back(k);
        if (r.rank != r.rank_exact) ++mismatches;
    }
    out.pass = mismatches == 0;
    out.csv = csv.str();
    json j = header("scan-rank", c);
    j["family_id"] = fam.id;
    j["points"] = np;
    j["nonzero_rank_indices"] = jump;
    j["closed_form_mismatches"] = mismatches;
    j["pass"] = out.pass;
    out.report = j;
    return out;
}

RunResult run_primitive_lift(const ExperimentConfig& c) {
    RunResult out;
    FamilySpec fam = c.family_spec();
    auto ctx = make_context(fam, c.t, c.disc(), c.hodge_options());
    std::mt19937 rng(static_cast<unsigned>(c.seed));
    std::vector<TrigField> pert;
    if (c.perturb)
        for (int a = 0; a < fam.n; ++a) pert.push_back(random_trig(fam.n, c.pert_max_mode, c.pert_amplitude, rng));
    auto base = trivialization_lift(ctx, pert);
    auto pl = primitive_lift(ctx, base);
    json j = header("primitive-lift", c);
    j["n"] = fam.n;
    if (fam.n == 1) {
        bool same = pl.kind == base.kind && pl.eta.size() == base.eta.size() && pl.pert.size() == base.pert.size();
        for (size_t a = 0; same && a < pl.eta.size(); ++a) same = pl.eta[a] == base.eta[a];
        j["unchanged"] = same;
        out.pass = same;
    } else {
        double before = primitivity_residual(ctx, base), after = primitivity_residual(ctx, pl);
        j["primitivity_before"] = before;
        j["primitivity_after"] = after;
        json hr = json::array();
        double worst = 0;
        for (const auto& f : ctx.basis) {
            auto h = hodge_riemann_check(kappa(ctx, pl, f, c.tau));
            hr.push_back({{"lhs", complex_json(h.lhs)}, {"rhs", complex_json(h.rhs)}, {"residual", h.residual}});
            worst = std::max(worst, h.residual);
        }
        j["hodge_riemann"] = hr;
        out.pass = after <= c.tol.primitivity && worst <= c.tol.hodge_riemann;
    }
    j["pass"] = out.pass;
    out.report = j;
    return out;
}

RunResult run_bls(const ExperimentConfig& c) {
    RunResult out;
    std::mt19937 rng(static_cast<unsigned>(c.seed));
    double s = c.bls_step, bound = c.tol.gauss_griffiths_factor * s * s;
    json fields = json::array();
    std::vector<std::pair<std::string, FiniteBLSField>> cat{{"identity", field_identity(3)},
                                                            {"exp-scalar", field_exp_scalar(3)},
                                                            {"exp-diag", field_exp_diag(1.0, 2.0)},
                                                            {"rotating-line", field_rotating_line()},
                                                            {"random", field_random(4, 2, rng)}};
    const cd pts[] = {{0, 0}, {0.3, -0.2}, {-0.4, 0.1}};
    for (auto& [name, F] : cat) {
        double gg = 0, hd = 0, mc = 0;
        for (cd t : pts) {
            gg = std::max(gg, gauss_griffiths_check(F, t, s).residual);
            hd = std::max(hd, curvature_hermitian_defect(F, t, s));
            mc = std::max(mc, metric_compatibility_defect(F, t, s, rng));
        }
        bool ok = gg <= bound && hd <= bound && mc <= bound;
        out.pass = out.pass && ok;
        fields.push_back({{"field", name}, {"gauss_griffiths", gg}, {"hermitian_defect", hd},
                          {"metric_compatibility", mc}, {"pass", ok}});
    }
    // closed form for the scalar exponential weight
    double ec = (chern_curvature_fd(field_exp_scalar(2), cd(0.3, -0.2), s) + MatC::Identity(2, 2)).norm();
    bool ec_ok = ec <= 2 * s * s;
    out.pass = out.pass && ec_ok;

    auto cases = demailly_battery(c.bls_instances, rng, c.bls_restarts);
    json inst = json::array();
    int dis = 0;
    for (const auto& d : cases) {
        if (!d.agree()) ++dis;
        inst.push_back({{"kind", d.kind}, {"m1", d.m1}, {"m2", d.m2}, {"r", d.r}, {"k", d.k}, {"als_min", d.als_min},
                        {"oracle_min", d.oracle_min}, {"als_positive", d.als_positive},
                        {"oracle_positive", d.oracle_positive}});
    }
    out.pass = out.pass && dis == 0;
    json j = header("bls", c);
    j["step"] = s;
    j["bound"] = bound;
    j["fields"] = fields;
    j["exp_scalar_closed_form"] = {{"residual", ec}, {"pass", ec_ok}};
    j["demailly"] = {{"instances", inst}, {"disagreements", dis}};
    if (c.inject_griffiths_not_nakano) {
        auto A = griffiths_not_nakano(1.5);
        auto k1 = run_demailly_case("griffiths-not-nakano", A, 1, rng, c.bls_restarts);
        auto k2 = run_demailly_case("griffiths-not-nakano", A, 2, rng, c.bls_restarts);
        bool ok = k1.als_positive && k1.agree() && !k2.als_positive && k2.agree();
        out.pass = out.pass && ok;
        j["griffiths_not_nakano"] = {{"one_positive", k1.als_positive},
                                     {"two_positive", k2.als_positive},
                                     {"one_min", k1.als_min},
                                     {"two_min", k2.als_min},
                                     {"pass", ok}};
    }
    j["pass"] = out.pass;
    out.report = j;
    return out;
}

RunResult run_report(const ExperimentConfig& c, int threads) {
    RunResult out;
    json sections = json::object();
    auto add = [&](const std::string& name, const RunResult& r) {
        sections[name] = r.report;
        out.pass = out.pass && r.pass;
    };
    add("hodge-check", run_hodge_check(c));
    if (c.family_spec().n == 1) add("curvature", run_curvature(c));
    add("primitive-lift", run_primitive_lift(c));
    ExperimentConfig sc = c;
    if (c.family_spec().kind != BundleKind::Flat) {
        sc.family = "jumping";
        sc.bundle = "flat";
        sc.degree = 0;
        sc.chi = VecR();
        sc.backend.clear();
        sc.size = 0;
    }
    RunResult scan = run_scan_rank(sc, threads);
    out.csv = scan.csv;
    add("scan-rank", scan);
    add("bls", run_bls(c));
    out.report = header("report", c);
    out.report["sections"] = sections;
    out.report["pass"] = out.pass;
    return out;
}

}  // namespace torlab
