#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "eshg/profile.hpp"
#include "eshg/variational.hpp"

namespace eshg::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "eshg";
inline constexpr const char* kToolVersion = "1.0.0";

struct Report {
    int schema = kSchemaVersion;
    std::string command;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json provenance = nlohmann::json::object();
    std::string timestamp;
};

nlohmann::json to_json(const Report& r);

/// Unknown fields are ignored; a missing or different schema number is rejected.
Report report_from_json(const nlohmann::json& j);

/// Stable serialization: two-space indent, keys in insertion order of the builders.
std::string dump(const Report& r);

std::string utc_timestamp();

/// "%.17g": enough digits for a lossless double round trip.
std::string format_double(double x);

/// Header t,U,V,Up,Vp plus U_va,V_va when an overlay ansatz is given.
void write_profile_csv(std::ostream& os, const FieldProfile& prof,
                       const std::optional<va::SolitonAnsatz>& overlay = std::nullopt);

/// Reads the first five columns back; extra columns are ignored.
FieldProfile read_profile_csv(std::istream& is, const ModelParams& p, double k);

std::string region_label(RegionClass r);

/// Everything except the profile samples; every k carries its region label.
nlohmann::json es_report_json(const EsReport& r, const ModelParams& p);

} // namespace eshg::io
