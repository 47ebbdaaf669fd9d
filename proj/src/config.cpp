#include "torlab/config.hpp"

#include <fstream>
#include <set>

namespace torlab {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Err::ConfigInvalid, msg); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) bad(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

double get_num(const json& j, const std::string& key, double def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) bad(where + "." + key + " must be a number");
    return j[key].get<double>();
}

double get_pos(const json& j, const std::string& key, double def, const std::string& where) {
    double v = get_num(j, key, def, where);
    if (!(v > 0)) bad(where + "." + key + " must be positive");
    return v;
}

long long get_int(const json& j, const std::string& key, long long def, const std::string& where, long long lo,
                  long long hi) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) bad(where + "." + key + " must be an integer");
    long long v = j[key].get<long long>();
    if (v < lo || v > hi) bad(where + "." + key + " out of range");
    return v;
}

bool get_bool(const json& j, const std::string& key, bool def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) bad(where + "." + key + " must be a boolean");
    return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& key, const std::string& def, const std::string& where,
                    const std::set<std::string>& choices = {}) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string()) bad(where + "." + key + " must be a string");
    std::string s = j[key].get<std::string>();
    if (!choices.empty() && !choices.count(s)) bad(where + "." + key + " has unsupported value '" + s + "'");
    return s;
}

cd get_cd(const json& j, const std::string& key, cd def, const std::string& where) {
    if (!j.contains(key)) return def;
    const auto& v = j[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        bad(where + "." + key + " must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

json cd_json(cd z) { return json::array({z.real(), z.imag()}); }

}  // namespace

FamilySpec ExperimentConfig::family_spec() const {
    BundleKind kind = bundle == "positive" ? BundleKind::Positive : BundleKind::Flat;
    int n = family == "siegel-diagonal" ? 2 : 1;
    VecR c = chi.size() ? chi : VecR::Zero(2 * n);
    if (family == "elliptic") return elliptic_family(t, kind, degree, c);
    if (family == "constant") return constant_family(t, omega0, kind, degree, c);
    if (family == "jumping") return jumping_family(t);
    return siegel_family(t, eps, w0, a, c);
}

Disc ExperimentConfig::disc() const {
    FamilySpec f = family_spec();
    std::string b = backend.empty() ? (bundle == "positive" ? "grid" : "spectral") : backend;
    if (b == "grid") return Disc::grid(size ? size : 64, order);
    return Disc::spectral(size ? size : (f.n == 1 ? 8 : 4));
}

HodgeOptions ExperimentConfig::hodge_options() const {
    HodgeOptions o;
    o.rank_tol = rank_tol;
    o.seed = static_cast<unsigned>(seed);
    return o;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    check_keys(j, {"family", "bundle", "discretization", "direction", "lift", "scan", "hodge", "fd", "bls",
                   "tolerances", "seed", "output"},
               "config");
    if (j.contains("family")) {
        const auto& f = j["family"];
        check_keys(f, {"id", "t", "omega0", "eps", "w0", "a"}, "family");
        c.family = get_str(f, "id", c.family, "family", {"elliptic", "constant", "jumping", "siegel-diagonal"});
        c.t = get_cd(f, "t", c.t, "family");
        c.omega0 = get_cd(f, "omega0", c.omega0, "family");
        c.eps = get_cd(f, "eps", c.eps, "family");
        c.w0 = get_cd(f, "w0", c.w0, "family");
        c.a = get_cd(f, "a", c.a, "family");
    }
    if (j.contains("bundle")) {
        const auto& b = j["bundle"];
        check_keys(b, {"kind", "degree", "chi"}, "bundle");
        c.bundle = get_str(b, "kind", c.bundle, "bundle", {"flat", "positive"});
        c.degree = static_cast<int>(get_int(b, "degree", c.degree, "bundle", 0, 16));
        if (b.contains("chi")) {
            const auto& v = b["chi"];
            if (!v.is_array()) bad("bundle.chi must be an array of numbers");
            c.chi = VecR(v.size());
            for (size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) bad("bundle.chi must be an array of numbers");
                c.chi(i) = v[i].get<double>();
            }
        }
    }
    if (j.contains("discretization")) {
        const auto& d = j["discretization"];
        check_keys(d, {"backend", "size", "order"}, "discretization");
        c.backend = get_str(d, "backend", c.backend, "discretization", {"spectral", "grid"});
        c.size = static_cast<int>(get_int(d, "size", c.size, "discretization", 1, 512));
        c.order = static_cast<int>(get_int(d, "order", c.order, "discretization", 2, 8));
        if (c.order % 2) bad("discretization.order must be 2, 4, 6 or 8");
    }
    if (j.contains("direction")) {
        const auto& d = j["direction"];
        check_keys(d, {"sigma", "tau"}, "direction");
        c.sigma = get_cd(d, "sigma", c.sigma, "direction");
        c.tau = get_cd(d, "tau", c.tau, "direction");
    }
    if (j.contains("lift")) {
        const auto& l = j["lift"];
        check_keys(l, {"perturb", "max_mode", "amplitude"}, "lift");
        c.perturb = get_bool(l, "perturb", c.perturb, "lift");
        c.pert_max_mode = static_cast<int>(get_int(l, "max_mode", c.pert_max_mode, "lift", 1, 8));
        c.pert_amplitude = get_pos(l, "amplitude", c.pert_amplitude, "lift");
    }
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        check_keys(s, {"start", "end", "points"}, "scan");
        c.scan_start = get_cd(s, "start", c.scan_start, "scan");
        c.scan_end = get_cd(s, "end", c.scan_end, "scan");
        c.scan_points = static_cast<int>(get_int(s, "points", c.scan_points, "scan", 1, 100000));
    }
    if (j.contains("hodge")) {
        const auto& h = j["hodge"];
        check_keys(h, {"rank_tol"}, "hodge");
        c.rank_tol = get_pos(h, "rank_tol", c.rank_tol, "hodge");
    }
    if (j.contains("fd")) {
        const auto& f = j["fd"];
        check_keys(f, {"step", "oracle"}, "fd");
        c.fd_step = get_pos(f, "step", c.fd_step, "fd");
        c.fd_oracle = get_bool(f, "oracle", c.fd_oracle, "fd");
    }
    if (j.contains("bls")) {
        const auto& b = j["bls"];
        check_keys(b, {"instances", "step", "restarts", "inject_griffiths_not_nakano"}, "bls");
        c.bls_instances = static_cast<int>(get_int(b, "instances", c.bls_instances, "bls", 0, 100000));
        c.bls_step = get_pos(b, "step", c.bls_step, "bls");
        c.bls_restarts = static_cast<int>(get_int(b, "restarts", c.bls_restarts, "bls", 1, 10000));
        c.inject_griffiths_not_nakano =
            get_bool(b, "inject_griffiths_not_nakano", c.inject_griffiths_not_nakano, "bls");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, {"identity_spectral", "identity_grid", "identity_grid_dbar2", "decomposition", "minimal_norm",
                       "spectrum", "nakano_floor", "sff_psd_floor", "routes", "oracle", "sff_routes",
                       "representatives", "primitivity", "hodge_riemann", "lift_independence",
                       "gauss_griffiths_factor"},
                   "tolerances");
        auto& T = c.tol;
        T.identity.spectral = get_pos(t, "identity_spectral", T.identity.spectral, "tolerances");
        T.identity.grid = get_pos(t, "identity_grid", T.identity.grid, "tolerances");
        T.identity.grid_dbar2 = get_pos(t, "identity_grid_dbar2", T.identity.grid_dbar2, "tolerances");
        T.identity.decomposition = get_pos(t, "decomposition", T.identity.decomposition, "tolerances");
        T.minimal_norm = get_pos(t, "minimal_norm", T.minimal_norm, "tolerances");
        T.spectrum = get_pos(t, "spectrum", T.spectrum, "tolerances");
        T.nakano_floor = get_pos(t, "nakano_floor", T.nakano_floor, "tolerances");
        T.sff_psd_floor = get_pos(t, "sff_psd_floor", T.sff_psd_floor, "tolerances");
        T.routes = get_pos(t, "routes", T.routes, "tolerances");
        T.oracle = get_pos(t, "oracle", T.oracle, "tolerances");
        T.sff_routes = get_pos(t, "sff_routes", T.sff_routes, "tolerances");
        T.representatives = get_pos(t, "representatives", T.representatives, "tolerances");
        T.primitivity = get_pos(t, "primitivity", T.primitivity, "tolerances");
        T.hodge_riemann = get_pos(t, "hodge_riemann", T.hodge_riemann, "tolerances");
        T.lift_independence = get_pos(t, "lift_independence", T.lift_independence, "tolerances");
        T.gauss_griffiths_factor = get_pos(t, "gauss_griffiths_factor", T.gauss_griffiths_factor, "tolerances");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.output = get_str(j, "output", c.output, "config");

    // cross-field consistency
    int n = c.family == "siegel-diagonal" ? 2 : 1;
    if (c.t.imag() <= 0) bad("family.t must have positive imaginary part");
    if (c.family == "constant" && c.omega0.imag() <= 0) bad("family.omega0 must have positive imaginary part");
    if (c.family == "jumping" && c.bundle != "flat") bad("the jumping family carries a flat bundle");
    if (c.bundle == "positive" && c.degree < 1) bad("positive bundles need degree >= 1");
    if (c.bundle == "positive" && n != 1) bad("positive bundles are supported for n = 1 only");
    if (c.bundle == "flat" && c.degree != 0) bad("flat bundles have degree 0");
    if (c.chi.size() && c.chi.size() != 2 * n) bad("bundle.chi must have 2n entries");
    std::string backend = c.backend.empty() ? (c.bundle == "positive" ? "grid" : "spectral") : c.backend;
    if ((backend == "grid") != (c.bundle == "positive")) bad("grid backend iff positive bundle");
    if (c.scan_points > 1 && c.scan_start == c.scan_end) bad("scan.start and scan.end coincide");
    if (c.scan_start.imag() <= 0 || c.scan_end.imag() <= 0) bad("scan endpoints must lie in the upper half plane");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) bad("cannot open config file " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json tolerances_json(const Tolerances& T) {
    return {{"identity_spectral", T.identity.spectral},
            {"identity_grid", T.identity.grid},
            {"identity_grid_dbar2", T.identity.grid_dbar2},
            {"decomposition", T.identity.decomposition},
            {"minimal_norm", T.minimal_norm},
            {"spectrum", T.spectrum},
            {"nakano_floor", T.nakano_floor},
            {"sff_psd_floor", T.sff_psd_floor},
            {"routes", T.routes},
            {"oracle", T.oracle},
            {"sff_routes", T.sff_routes},
            {"representatives", T.representatives},
            {"primitivity", T.primitivity},
            {"hodge_riemann", T.hodge_riemann},
            {"lift_independence", T.lift_independence},
            {"gauss_griffiths_factor", T.gauss_griffiths_factor}};
}

json config_json(const ExperimentConfig& c) {
    json chi = json::array();
    for (int i = 0; i < c.chi.size(); ++i) chi.push_back(c.chi(i));
    Disc d = c.disc();
    return {{"family", {{"id", c.family}, {"t", cd_json(c.t)}, {"omega0", cd_json(c.omega0)}, {"eps", cd_json(c.eps)},
                        {"w0", cd_json(c.w0)}, {"a", cd_json(c.a)}}},
            {"bundle", {{"kind", c.bundle}, {"degree", c.degree}, {"chi", chi}}},
            {"discretization",
             {{"backend", d.kind == DiscKind::Grid ? "grid" : "spectral"}, {"size", d.size}, {"order", d.order}}},
            {"direction", {{"sigma", cd_json(c.sigma)}, {"tau", cd_json(c.tau)}}},
            {"lift", {{"perturb", c.perturb}, {"max_mode", c.pert_max_mode}, {"amplitude", c.pert_amplitude}}},
            {"scan", {{"start", cd_json(c.scan_start)}, {"end", cd_json(c.scan_end)}, {"points", c.scan_points}}},
            {"hodge", {{"rank_tol", c.rank_tol}}},
            {"fd", {{"step", c.fd_step}, {"oracle", c.fd_oracle}}},
            {"bls",
             {{"instances", c.bls_instances},
              {"step", c.bls_step},
              {"restarts", c.bls_restarts},
              {"inject_griffiths_not_nakano", c.inject_griffiths_not_nakano}}},
            {"seed", c.seed}};
}

}  // namespace torlab
