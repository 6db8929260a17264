#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "eshg/model.hpp"
#include "eshg/variational.hpp"

namespace eshg {

/// Half-line sample of an even soliton: ts runs from 0 to T_max.
struct FieldProfile {
    ModelParams params;
    double k = 0.0;
    std::vector<double> ts;
    std::vector<double> Us;
    std::vector<double> Vs;
    std::vector<double> Ups;
    std::vector<double> Vps;

    FieldProfile(const ModelParams& p, double k_) : params(p), k(k_) {}

    [[nodiscard]] std::size_t size() const noexcept { return ts.size(); }
    [[nodiscard]] double t_max() const { return ts.back(); }
    [[nodiscard]] double max_abs_U() const;
    [[nodiscard]] double max_abs_V() const;
    [[nodiscard]] StationaryState state(std::size_t i) const { return {k, Us[i], Ups[i], Vs[i], Vps[i]}; }

    void push(double t, double U, double Up, double V, double Vp);

    /// Throws InvalidArgument unless ts starts at 0, increases strictly, and all columns agree in length.
    void validate() const;
};

/// Uniform sampling of the sech/sech^2 ansatz on [0, T_max] with n intervals.
FieldProfile sample_ansatz(const ModelParams& p, const va::SolitonAnsatz& a, double T_max, std::size_t n);

/// Max |residual_U|, |residual_V| on a uniform grid, with second derivatives taken by a
/// sixth-order central difference of the derivative columns. Needs a uniform grid with
/// at least 7 samples; interior points only.
double profile_residual(const FieldProfile& prof);

enum class EsMethod { TailScan, CriterionClosedForm, CriterionFromProfile };

std::string_view to_string(EsMethod m);

struct EsCandidate {
    double k = 0.0;
    double b = 0.0;
    bool accepted = false;
    std::string note;
};

struct EsReport {
    double k_es = 0.0;
    RegionClass region = RegionClass::Neither;
    double b_at_min = 0.0;
    double A = 0.0;
    double B = 0.0;
    EsMethod method = EsMethod::TailScan;
    double residual_max = 0.0;
    std::vector<FieldProfile> profile;   // zero or one entry
    std::vector<std::pair<std::string, double>> diagnostics;
    std::vector<EsCandidate> candidates;
    std::vector<std::pair<double, double>> scan_samples;  // (k, b_min); NaN b marks a failed sample

    [[nodiscard]] double diagnostic(const std::string& name) const;
};

} // namespace eshg
