#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "eshg/report.hpp"
#include "eshg/shooting.hpp"

using namespace eshg;
using namespace eshg::io;

TEST_CASE("report JSON round trip is bit-exact")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    Report r;
    r.command = "locate-es";
    r.inputs = {{"delta", "1"}, {"q", "1"}};
    r.results = nlohmann::json::object();
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) {
        xs.push_back(u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 30));
    }
    xs.push_back(37.0 / 42.0);
    xs.push_back(std::numeric_limits<double>::denorm_min());
    r.results["values"] = xs;
    r.results["k_es"] = 0.6962594685123;
    r.provenance = {{"tool", kToolName}};
    r.timestamp = utc_timestamp();

    const Report back = report_from_json(nlohmann::json::parse(dump(r)));
    CHECK(back.schema == kSchemaVersion);
    CHECK(back.command == r.command);
    CHECK(back.timestamp == r.timestamp);
    const auto got = back.results["values"].get<std::vector<double>>();
    REQUIRE(got.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(got[i] == xs[i]);
    }
    CHECK(back.results["k_es"].get<double>() == 0.6962594685123);
}

TEST_CASE("report reader ignores unknown fields and checks the schema")
{
    auto j = to_json(Report{});
    j["extra"] = {{"anything", 1}};
    CHECK_NOTHROW(report_from_json(j));
    j["schema"] = 2;
    CHECK_THROWS_AS(report_from_json(j), Error);
    j.erase("schema");
    CHECK_THROWS_AS(report_from_json(j), Error);
}

TEST_CASE("dump is deterministic apart from the timestamp")
{
    Report a;
    a.command = "va-solve";
    a.results = {{"x", 0.1}, {"a", {1, 2, 3}}};
    a.timestamp = "T1";
    Report b = a;
    CHECK(dump(a) == dump(b));
    b.timestamp = "T2";
    CHECK(dump(a) != dump(b));
    CHECK(dump(a).back() == '\n');
}

TEST_CASE("format_double round trips")
{
    for (double x : {0.1, 1.0 / 3.0, 2.5e-300, -7.123456789012345e12}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("profile CSV round trip and header")
{
    const ModelParams p(1, 1, 0, -0.25);
    const FieldProfile prof = sample_ansatz(p, {1.1, 0.6, 0.4}, 12.0, 300);
    std::stringstream ss;
    write_profile_csv(ss, prof);
    const std::string text = ss.str();
    CHECK(text.rfind("t,U,V,Up,Vp\n", 0) == 0);
    const FieldProfile back = read_profile_csv(ss, p, 0.4);
    CHECK(back.ts == prof.ts);
    CHECK(back.Us == prof.Us);
    CHECK(back.Vs == prof.Vs);
    CHECK(back.Ups == prof.Ups);
    CHECK(back.Vps == prof.Vps);

    std::stringstream ov;
    write_profile_csv(ov, prof, va::SolitonAnsatz{1.0, 0.5, 0.4});
    CHECK(ov.str().rfind("t,U,V,Up,Vp,U_va,V_va\n", 0) == 0);
    const FieldProfile back2 = read_profile_csv(ov, p, 0.4);
    CHECK(back2.Us == prof.Us);

    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS_AS(read_profile_csv(bad, p, 0.4), Error);
}

TEST_CASE("ES report JSON labels every k")
{
    const ModelParams p(1, 1, -0.05, -0.05);
    EsReport r;
    r.k_es = 0.88;
    r.region = classify_region(p, r.k_es);
    r.b_at_min = std::numeric_limits<double>::quiet_NaN();
    r.candidates.push_back({0.88, 1e-9, true, "ok"});
    r.candidates.push_back({0.3, 1e-2, false, "rejected"});
    r.scan_samples = {{0.7, 0.1}, {0.8, std::numeric_limits<double>::quiet_NaN()}};
    r.diagnostics = {{"omega", 1.2}};
    const nlohmann::json j = es_report_json(r, p);
    CHECK(j["label"] == "Embedded");
    CHECK(j["b_at_min"].is_null());
    CHECK(j["candidates"][0]["region"] == "EmbeddedPermitted");
    CHECK(j["candidates"][1]["region"] == "Ordinary");
    CHECK(j["scan_samples"][1]["b_min"].is_null());
    CHECK(j["diagnostics"]["omega"] == 1.2);
    CHECK(region_label(RegionClass::Ordinary) == "Ordinary");
}
