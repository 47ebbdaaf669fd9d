#pragma once

#include <string>

#include "torlab/config.hpp"

namespace torlab {

struct RunResult {
    json report;
    bool pass = true;
    std::string csv;           // scan rows
    std::string spectrum_csv;  // bidegree,index,eigenvalue
};

// matrices as row-major lists of [re, im] pairs
json matrix_json(const MatC& M);
json complex_json(cd z);

RunResult run_hodge_check(const ExperimentConfig& c, bool dump_spectrum = false);
RunResult run_curvature(const ExperimentConfig& c);
RunResult run_scan_rank(const ExperimentConfig& c, int threads = 1);
RunResult run_primitive_lift(const ExperimentConfig& c);
RunResult run_bls(const ExperimentConfig& c);
// all of the above; the scan falls back to the jumping family when the configured one is not flat
RunResult run_report(const ExperimentConfig& c, int threads = 1);

}  // namespace torlab
