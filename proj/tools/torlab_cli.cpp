#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "torlab/report.hpp"

using namespace torlab;

namespace {

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw Error(Err::ConfigInvalid, "cannot write " + path);
    os << text;
}

int exit_code(Err e) {
    switch (e) {
        case Err::ConfigInvalid:
        case Err::DiscMismatch:
        case Err::UnsupportedDimension:
        case Err::NonPositivePeriod:
        case Err::Precondition:
            return 2;
        default:
            return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hodge theory and direct-image curvature on complex tori"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_path;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int threads = 1;
    bool dump_spectrum = false;
    app.add_option("--config", config_path, "experiment configuration (JSON)");
    app.add_option("--out", out_path, "output file (stdout if omitted)");
    app.add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s, have_seed = true; }, "random seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--dump-spectrum", dump_spectrum, "write the computed spectra as CSV next to the report");
    const char* names[] = {"hodge-check", "curvature", "scan-rank", "primitive-lift", "bls", "report"};
    const char* help[] = {"operator identities, Hodge decomposition and flat spectra",
                          "curvature of the direct image by both routes",
                          "rank of the direct image along a segment of the base (CSV)",
                          "primitive horizontal lift and Hodge-Riemann check",
                          "finite-dimensional battery: Gauss-Griffiths and Schur-complement positivity",
                          "all of the above in one report"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Eigen::setNbThreads(threads);
        ExperimentConfig c = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
        if (have_seed) c.seed = seed;
        if (out_path.empty()) out_path = c.output;
        RunResult r;
        if (cmd == "hodge-check")
            r = run_hodge_check(c, dump_spectrum);
        else if (cmd == "curvature")
            r = run_curvature(c);
        else if (cmd == "scan-rank")
            r = run_scan_rank(c, threads);
        else if (cmd == "primitive-lift")
            r = run_primitive_lift(c);
        else if (cmd == "bls")
            r = run_bls(c);
        else
            r = run_report(c, threads);
        r.report["timestamp"] = utc_timestamp();
        if (cmd == "scan-rank") {
            write_text(out_path, r.csv);
            std::cerr << r.report.dump() << "\n";
        } else {
            write_text(out_path, r.report.dump(2) + "\n");
            if (cmd == "report" && !out_path.empty()) write_text(out_path + ".scan.csv", r.csv);
        }
        if (dump_spectrum && !r.spectrum_csv.empty())
            write_text(out_path.empty() ? "spectrum.csv" : out_path + ".spectrum.csv", r.spectrum_csv);
        return r.pass ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
