#include "doctest.h"
#include "torlab/report.hpp"

using namespace torlab;

TEST_CASE("schema validation") {
    auto ok = parse_config(json::parse(R"({"family":{"id":"elliptic","t":[0.2,1.1]},"bundle":{"kind":"positive","degree":2}})"));
    CHECK(ok.degree == 2);
    CHECK(ok.disc().kind == DiscKind::Grid);
    auto bad = [](const char* s) { CHECK_THROWS_AS(parse_config(json::parse(s)), Error); };
    bad(R"({"colour":1})");
    bad(R"({"family":{"id":"elliptic","tt":[0,1]}})");
    bad(R"({"family":{"id":"klein"}})");
    bad(R"({"family":{"t":"i"}})");
    bad(R"({"family":{"t":[0.0,-1.0]}})");
    bad(R"({"bundle":{"kind":"positive","degree":0}})");
    bad(R"({"bundle":{"kind":"flat","degree":1}})");
    bad(R"({"bundle":{"chi":[0.1,0.2,0.3]}})");
    bad(R"({"discretization":{"backend":"grid"}})");
    bad(R"({"discretization":{"order":3}})");
    bad(R"({"family":{"id":"siegel-diagonal"},"bundle":{"kind":"positive","degree":1}})");
    bad(R"({"tolerances":{"routes":-1}})");
    bad(R"({"tolerances":{"unknown":1}})");
    bad(R"({"seed":-3})");
    bad(R"({"scan":{"start":[0,1],"end":[0,1]}})");
    try {
        parse_config(json::parse(R"({"lift":{"perturb":"yes"}})"));
        FAIL("accepted a string for a boolean");
    } catch (const Error& e) {
        CHECK(e.code() == Err::ConfigInvalid);
    }
}

TEST_CASE("config round trip and tolerance echo") {
    auto c = parse_config(json::parse(R"({"tolerances":{"routes":2e-5},"seed":42})"));
    auto j = config_json(c);
    auto c2 = parse_config(j);
    CHECK(config_json(c2) == j);
    CHECK(tolerances_json(c.tol)["routes"].get<double>() == 2e-5);
    CHECK(c2.seed == 42);
}

TEST_CASE("matrix layout is row-major complex pairs") {
    MatC M(2, 3);
    M << cd(1, 2), cd(3, 4), cd(5, 6), cd(7, 8), cd(9, 10), cd(11, 12);
    auto j = matrix_json(M);
    CHECK(j["rows"] == 2);
    CHECK(j["cols"] == 3);
    REQUIRE(j["data"].size() == 6);
    CHECK(j["data"][1][0].get<double>() == 3);
    CHECK(j["data"][3][1].get<double>() == 8);
}

TEST_CASE("scan CSV and determinism") {
    auto c = parse_config(json::parse(
        R"({"family":{"id":"jumping"},"scan":{"start":[-0.5,1],"end":[0.5,1],"points":11},"bls":{"instances":7,"restarts":10}})"));
    auto s = run_scan_rank(c, 2);
    CHECK(s.csv.rfind("t_re,t_im,rank,lambda1\n", 0) == 0);
    CHECK(s.pass);
    auto b1 = run_bls(c), b2 = run_bls(c);
    CHECK(b1.report.dump() == b2.report.dump());
    CHECK(b1.report.contains("tolerances"));
    CHECK(b1.report["seed"] == 7);
}

TEST_CASE("spectrum dump") {
    auto c = parse_config(json::parse(R"({"discretization":{"size":3}})"));
    auto r = run_hodge_check(c, true);
    CHECK(r.pass);
    CHECK(r.spectrum_csv.rfind("bidegree,index,eigenvalue\n", 0) == 0);
    CHECK(r.report["tolerances"]["spectrum"].get<double>() == 1e-9);
}
