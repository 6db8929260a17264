#include "eshg/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

namespace eshg::io {

using nlohmann::json;

json to_json(const Report& r)
{
    json j = json::object();
    j["schema"] = r.schema;
    j["command"] = r.command;
    j["inputs"] = r.inputs;
    j["results"] = r.results;
    j["provenance"] = r.provenance;
    j["timestamp"] = r.timestamp;
    return j;
}

Report report_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("schema") || j.at("schema") != kSchemaVersion) {
        fail(ErrorCode::InvalidArgument, "report: unsupported or missing schema version");
    }
    Report r;
    r.schema = j.at("schema").get<int>();
    r.command = j.value("command", std::string{});
    r.inputs = j.value("inputs", json::object());
    r.results = j.value("results", json::object());
    r.provenance = j.value("provenance", json::object());
    r.timestamp = j.value("timestamp", std::string{});
    return r;
}

std::string dump(const Report& r)
{
    return to_json(r).dump(2) + "\n";
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_profile_csv(std::ostream& os, const FieldProfile& prof, const std::optional<va::SolitonAnsatz>& overlay)
{
    os << "t,U,V,Up,Vp";
    if (overlay) {
        os << ",U_va,V_va";
    }
    os << "\n";
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double t = prof.ts[i];
        os << format_double(t) << ',' << format_double(prof.Us[i]) << ',' << format_double(prof.Vs[i]) << ','
           << format_double(prof.Ups[i]) << ',' << format_double(prof.Vps[i]);
        if (overlay) {
            os << ',' << format_double(overlay->U(t)) << ',' << format_double(overlay->V(t));
        }
        os << "\n";
    }
}

FieldProfile read_profile_csv(std::istream& is, const ModelParams& p, double k)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,U,V,Up,Vp", 0) != 0) {
        fail(ErrorCode::InvalidArgument, "profile CSV: missing header");
    }
    FieldProfile prof(p, k);
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        double v[5];
        std::string cell;
        for (double& x : v) {
            if (!std::getline(row, cell, ',')) {
                fail(ErrorCode::InvalidArgument, "profile CSV: short row");
            }
            x = std::stod(cell);
        }
        prof.push(v[0], v[1], v[3], v[2], v[4]);
    }
    prof.validate();
    return prof;
}

std::string region_label(RegionClass r)
{
    switch (r) {
    case RegionClass::Ordinary:
        return "Ordinary";
    case RegionClass::EmbeddedPermitted:
        return "Embedded";
    case RegionClass::Neither:
        break;
    }
    return "Neither";
}

namespace {

json number_or_null(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

} // namespace

json es_report_json(const EsReport& r, const ModelParams& p)
{
    json j = json::object();
    j["k_es"] = r.k_es;
    j["region"] = std::string(to_string(r.region));
    j["label"] = region_label(r.region);
    j["method"] = std::string(to_string(r.method));
    j["A"] = r.A;
    j["B"] = r.B;
    j["b_at_min"] = number_or_null(r.b_at_min);
    j["residual_max"] = number_or_null(r.residual_max);
    json diag = json::object();
    for (const auto& [key, value] : r.diagnostics) {
        diag[key] = number_or_null(value);
    }
    j["diagnostics"] = diag;
    json cands = json::array();
    for (const auto& c : r.candidates) {
        cands.push_back({{"k", c.k},
                         {"region", std::string(to_string(classify_region(p, c.k)))},
                         {"b", number_or_null(c.b)},
                         {"accepted", c.accepted},
                         {"note", c.note}});
    }
    j["candidates"] = cands;
    if (!r.scan_samples.empty()) {
        json samples = json::array();
        for (const auto& [k, b] : r.scan_samples) {
            samples.push_back({{"k", k}, {"b_min", number_or_null(b)}});
        }
        j["scan_samples"] = samples;
    }
    return j;
}

} // namespace eshg::io
