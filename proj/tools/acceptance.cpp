#include <chrono>
#include <cstdio>
#include <string>

#include "torlab/report.hpp"

using namespace torlab;

namespace {

using clk = std::chrono::steady_clock;

double secs(clk::time_point a) { return std::chrono::duration<double>(clk::now() - a).count(); }

int failures = 0;

void line(const char* id, bool ok, const std::string& detail) {
    std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

ExperimentConfig cfg(const char* text) { return parse_config(json::parse(text)); }

double worst(const json& checks, const std::string& prefix, bool& ok) {
    double w = 0;
    for (const auto& c : checks)
        if (c["name"].get<std::string>().rfind(prefix, 0) == 0) {
            w = std::max(w, c["residual"].get<double>());
            ok = ok && c["pass"].get<bool>();
        }
    return w;
}

double vmax(const json& v) {
    double w = 0;
    for (const auto& x : v) w = std::max(w, x.get<double>());
    return w;
}

}  // namespace

int main() {
    // AC1 and AC2: flat identities, decomposition, minimal norm, spectra (n = 1 and n = 2)
    {
        auto t0 = clk::now();
        auto h1 = run_hodge_check(cfg(R"({"bundle":{"chi":[0.25,0.6]}})"));
        auto h2 = run_hodge_check(cfg(R"({"family":{"id":"siegel-diagonal"}})"));
        double el = secs(t0);
        bool ok1 = true, ok2 = true;
        double id = 0, dec = 0, mn = 0, sp = 0, ker = 0;
        for (const auto* h : {&h1, &h2}) {
            const auto& ch = h->report["checks"];
            for (const char* nm : {"dbar", "nabla", "hodge_identity", "bochner", "lefschetz"})
                id = std::max(id, worst(ch, nm, ok1));
            dec = std::max(dec, worst(ch, "hodge_decomposition", ok2));
            mn = std::max(mn, worst(ch, "minimal_norm", ok2));
            sp = std::max(sp, worst(ch, "spectrum", ok2));
            ker = std::max(ker, worst(ch, "kernel", ok2));
        }
        line("AC1", ok1 && id <= 1e-10 && el < 10, "identity residual " + num(id) + ", " + num(el) + " s");
        line("AC2", ok2 && dec <= 1e-9 && mn <= 1e-8 && ker == 0,
             "decomposition " + num(dec) + ", minimal norm " + num(mn) + ", spectrum " + num(sp) + ", kernel " +
                 num(ker));
    }
    // AC3: rank scan across the jumping locus
    {
        auto t0 = clk::now();
        auto s = run_scan_rank(cfg(R"({"family":{"id":"jumping"},"scan":{"points":101}})"));
        double el = secs(t0);
        const auto& nz = s.report["nonzero_rank_indices"];
        bool ok = nz.size() == 1 && nz[0] == 50 && s.report["closed_form_mismatches"] == 0 && el < 30;
        line("AC3", ok, "jumps at " + nz.dump() + " of 101, " + num(el) + " s");
    }
    // AC4: primitive lift
    {
        auto p2 = run_primitive_lift(cfg(R"({"family":{"id":"siegel-diagonal"}})"));
        auto p1 = run_primitive_lift(cfg("{}"));
        double hr = 0;
        for (const auto& h : p2.report["hodge_riemann"]) hr = std::max(hr, h["residual"].get<double>());
        double prim = p2.report["primitivity_after"];
        bool ok = prim <= 1e-8 && hr <= 1e-7 && p1.report["unchanged"].get<bool>();
        line("AC4", ok, "primitivity " + num(prim) + ", Hodge-Riemann " + num(hr) + ", n=1 unchanged " +
                            p1.report["unchanged"].dump());
    }
    // AC5 to AC9: positive bundles of degree 1..3 on a 64-point grid
    {
        double rep = 0, routes = 0, orc = 0, nak = 1e300, sff = 1e300, ind = 0, sffr = 0, tmax = 0;
        bool ok5 = true, ok6 = true, ok7 = true, ok8 = true, ok9 = true;
        for (int d = 1; d <= 3; ++d) {
            std::string text = R"({"bundle":{"kind":"positive","degree":)" + std::to_string(d) +
                               R"(},"discretization":{"backend":"grid","size":64,"order":8}})";
            auto t0 = clk::now();
            auto r = run_curvature(cfg(text.c_str()));
            double el = secs(t0);
            tmax = std::max(tmax, el);
            const auto& j = r.report;
            const auto& v = j["verdict"];
            double a = std::max({vmax(j["representatives"]["a"]), vmax(j["representatives"]["b"]),
                                 vmax(j["representatives"]["c"])});
            rep = std::max(rep, a);
            ok5 = ok5 && a <= 1e-6;
            double rt = j["residual_routes"], o = std::max(j["oracle"]["three_term_rel"].get<double>(),
                                                             j["oracle"]["bly_rel"].get<double>());
            routes = std::max(routes, rt);
            orc = std::max(orc, o);
            ok6 = ok6 && rt <= 1e-5 && o <= 1e-3 && el < 300;
            nak = std::min(nak, j["nakano_min_eig"].get<double>());
            sff = std::min(sff, j["sff_min_eig"].get<double>());
            ok7 = ok7 && v["nakano"].get<bool>() && v["sff_psd"].get<bool>();
            ind = std::max(ind, j["lift_independence"].get<double>());
            ok8 = ok8 && j["lift_independence"].get<double>() <= 1e-5;
            sffr = std::max(sffr, j["sff_routes"].get<double>());
            ok9 = ok9 && j["sff_routes"].get<double>() <= 1e-6;
        }
        line("AC5", ok5, "representative residual " + num(rep));
        line("AC6", ok6, "routes " + num(routes) + ", oracle " + num(orc) + ", slowest case " + num(tmax) + " s");
        line("AC7", ok7, "Nakano min " + num(nak) + ", sff min " + num(sff));
        line("AC8", ok8, "lift independence " + num(ind));
        line("AC9", ok9, "sff routes " + num(sffr));
    }
    // AC10: finite-dimensional battery
    {
        auto b = run_bls(cfg(R"({"bls":{"instances":100}})"));
        const auto& j = b.report;
        double gg = 0;
        bool ok = true;
        for (const auto& f : j["fields"]) {
            gg = std::max(gg, f["gauss_griffiths"].get<double>());
            ok = ok && f["pass"].get<bool>();
        }
        int dis = j["demailly"]["disagreements"];
        ok = ok && dis == 0 && j["demailly"]["instances"].size() == 100 && j["pass"].get<bool>();
        line("AC10", ok, "Gauss-Griffiths " + num(gg) + " (bound " + num(j["bound"].get<double>()) + "), " +
                             std::to_string(dis) + " disagreements in 100");
    }
    return failures ? 1 : 0;
}
