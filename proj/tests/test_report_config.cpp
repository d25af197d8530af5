#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qtwist/config.hpp"
#include "qtwist/report.hpp"
#include "qtwist/runner.hpp"

using namespace qtwist;

TEST_CASE("empty report emits a header-only csv") {
    Report r;
    CHECK(to_csv(r) == "check_id,params,value,target,provenance,pass,seconds\n");
}

TEST_CASE("csv quoting and significant digits") {
    Report r;
    CheckRow row;
    row.check_id = "demo/check";
    row.params = "q=0.5,N=8,note=\"x\"";
    row.value = 1.0 / 3.0;
    row.target = 2.0;
    row.provenance = "trivial";
    row.pass = true;
    r.rows.push_back(row);
    const std::string csv = to_csv(r);
    CHECK(csv.find("\"q=0.5,N=8,note=\"\"x\"\"\"") != std::string::npos);
    CHECK(csv.find("0.333333333333") != std::string::npos);
    // emitting the same report twice is byte-identical
    CHECK(to_csv(r) == csv);
    CHECK(to_json(r) == to_json(r));
}

TEST_CASE("json round trip preserves rows at full precision") {
    Report r;
    CheckRow row;
    row.check_id = "demo/check";
    row.params = "q=0.5";
    row.value = 0.639921877384186;
    row.target = 0.64;
    row.provenance = "paper-quoted";
    row.pass = false;
    r.rows.push_back(row);
    const auto j = nlohmann::json::parse(to_json(r));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["check_id"] == "demo/check");
    CHECK(j[0]["value"].get<double>() == doctest::Approx(0.639921877384186).epsilon(1e-12));
    CHECK(j[0]["pass"] == false);
}

TEST_CASE("canonical ordering and exit codes") {
    Report r;
    CheckRow a{"b/check", "x=2", 0, 0, "trivial", true, false, 0};
    CheckRow b{"a/check", "x=1", 0, 0, "trivial", true, false, 0};
    CheckRow c{"b/check", "x=1", 0, 0, "trivial", true, false, 0};
    r.rows = {a, b, c};
    r.sort_canonical();
    CHECK(r.rows[0].check_id == "a/check");
    CHECK(r.rows[1].params == "x=1");
    CHECK(r.exit_code() == 0);
    r.rows[0].pass = false;
    CHECK(r.exit_code() == 1);
    r.rows[1].error = true;
    CHECK(r.exit_code() == 2);
}

TEST_CASE("minimal config gets the documented defaults") {
    const ExperimentConfig c = parse_config("{}");
    CHECK(c.fock_levels == 8);
    CHECK(c.winding_radius == 3);
    CHECK(c.factors == 6);
    CHECK(c.twist_level == 3);
    CHECK(c.probes == 20);
    CHECK(c.seed == 42);
    CHECK(c.format == "csv");
    REQUIRE(c.q_seq.terms.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(c.q_seq.terms[k] == std::pow(2.0, -(k + 1)));
    CHECK_FALSE(c.qseq_summable_warning);
}

TEST_CASE("geometric and explicit q sequences") {
    const ExperimentConfig g =
        parse_config(R"({"q_seq": {"kind": "geometric", "base": 0.5, "ratio": 0.5}})");
    for (int k = 0; k < 6; ++k) CHECK(g.q_seq.terms[k] == std::pow(2.0, -(k + 1)));

    const ExperimentConfig e = parse_config(
        R"({"q_seq": {"kind": "explicit", "terms": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]}})");
    CHECK(e.qseq_summable_warning);  // accepted, certificate refused
}

TEST_CASE("config rejections") {
    CHECK_THROWS_WITH_AS((void)parse_config(R"({"focks": 8})"), doctest::Contains("unknown config key"),
                         ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"q_seq": {"kind": "geometric", "base": 1.0}})"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"q_seq": {"kind": "explicit", "terms": [0.0]}})"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"fock_levels": 2})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"format": "xml"})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"twist_level": 9})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"commands": ["fly"]})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("not json"), ConfigError);
}

TEST_CASE("resolvability failures surface as error rows with exit code 2") {
    ExperimentConfig cfg = parse_config(R"({"cluster_tol": 0.2})");
    // a tolerance wider than the target gaps makes the clusters overlap
    const Report rep = run(cfg, "converge");
    CHECK(rep.any_error());
    CHECK(rep.exit_code() == 2);
    bool found = false;
    for (const auto& row : rep.rows)
        if (row.error && row.params.find("indistinguishable") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("file emission is deterministic in both formats") {
    Report r;
    CheckRow row{"demo/check", "q=0.5,K=3", 0.125, 0.25, "trivial", true, false, 0.0};
    r.rows.push_back(row);
    for (const std::string fmt : {"csv", "json"}) {
        const std::string p1 = "emit_test_1." + fmt, p2 = "emit_test_2." + fmt;
        emit(r, fmt, p1);
        emit(r, fmt, p2);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        CHECK(s1.str() == s2.str());
        CHECK(!s1.str().empty());
        std::remove(p1.c_str());
        std::remove(p2.c_str());
    }
    CHECK_THROWS_AS(emit(r, "xml", "x"), std::invalid_argument);
    CHECK_THROWS_AS(emit(r, "csv", "/no/such/dir/x.csv"), std::runtime_error);
}
