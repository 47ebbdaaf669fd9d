#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "torlab/hodge.hpp"
#include "torlab/identities.hpp"

namespace torlab {

using json = nlohmann::json;

struct Tolerances {
    IdentityTolerances identity;
    double minimal_norm = 1e-8;
    double spectrum = 1e-9;        // relative to the largest eigenvalue
    double nakano_floor = 1e-6;    // min eig of the curvature form ≥ −nakano_floor
    double sff_psd_floor = 1e-10;  // min eig of the sff term ≥ −sff_psd_floor
    double routes = 1e-5;          // three-term against the pushforward route, relative
    double oracle = 1e-3;          // both routes against the finite-difference oracle, relative
    double sff_routes = 1e-6;
    double representatives = 1e-6;
    double primitivity = 1e-8;
    double hodge_riemann = 1e-7;
    double lift_independence = 1e-5;
    double gauss_griffiths_factor = 10;  // residual ≤ factor·step²
};

struct ExperimentConfig {
    std::string family = "elliptic";  // elliptic | constant | jumping | siegel-diagonal
    cd t{0, 1};
    cd omega0{0, 1};                                       // constant family
    cd eps{0.1, 0.05}, w0{0.2, 1.3}, a{0.3, 0.1};          // siegel-diagonal family
    std::string bundle = "flat";                           // flat | positive
    int degree = 0;
    VecR chi;                                              // empty: zero character
    std::string backend;                                   // empty: spectral for flat, grid for positive
    int size = 0;                                          // 0: backend default
    int order = 8;
    cd sigma{1, 0}, tau{1, 0};
    bool perturb = true;  // second lift with a random vertical perturbation
    int pert_max_mode = 2;
    double pert_amplitude = 0.3;
    cd scan_start{-0.5, 1}, scan_end{0.5, 1};
    int scan_points = 101;
    double rank_tol = 1e-7;
    double fd_step = 1e-3;
    bool fd_oracle = true;
    int bls_instances = 100;
    double bls_step = 1e-3;
    int bls_restarts = 50;
    bool inject_griffiths_not_nakano = true;
    Tolerances tol;
    std::uint64_t seed = 7;
    std::string output;

    FamilySpec family_spec() const;
    Disc disc() const;
    HodgeOptions hodge_options() const;
};

// validates against the schema; unknown keys, wrong types and inconsistent choices raise ConfigInvalid
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);
json tolerances_json(const Tolerances& t);
json config_json(const ExperimentConfig& c);

}  // namespace torlab
