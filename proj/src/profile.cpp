#include "eshg/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eshg {

namespace {

double max_abs(const std::vector<double>& xs)
{
    double m = 0.0;
    for (double x : xs) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

double FieldProfile::max_abs_U() const
{
    return max_abs(Us);
}

double FieldProfile::max_abs_V() const
{
    return max_abs(Vs);
}

void FieldProfile::push(double t, double U, double Up, double V, double Vp)
{
    ts.push_back(t);
    Us.push_back(U);
    Ups.push_back(Up);
    Vs.push_back(V);
    Vps.push_back(Vp);
}

void FieldProfile::validate() const
{
    const std::size_t n = ts.size();
    if (n < 2 || Us.size() != n || Vs.size() != n || Ups.size() != n || Vps.size() != n) {
        fail(ErrorCode::InvalidArgument, "profile needs at least 2 samples and equal-length columns");
    }
    if (ts.front() != 0.0) {
        fail(ErrorCode::InvalidArgument, "profile must start at t = 0");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(ts[i] > ts[i - 1])) {
            fail(ErrorCode::InvalidArgument, "profile times must increase strictly");
        }
    }
}

FieldProfile sample_ansatz(const ModelParams& p, const va::SolitonAnsatz& a, double T_max, std::size_t n)
{
    if (!(T_max > 0.0) || n < 1) {
        fail(ErrorCode::InvalidArgument, "sample_ansatz: need T_max > 0 and n >= 1");
    }
    FieldProfile prof(p, a.k);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = T_max * static_cast<double>(i) / static_cast<double>(n);
        prof.push(t, a.U(t), i == 0 ? 0.0 : a.Up(t), a.V(t), i == 0 ? 0.0 : a.Vp(t));
    }
    return prof;
}

double profile_residual(const FieldProfile& prof)
{
    prof.validate();
    const std::size_t n = prof.size();
    if (n < 7) {
        fail(ErrorCode::InvalidArgument, "profile_residual needs at least 7 samples");
    }
    const double h = prof.ts[1] - prof.ts[0];
    // Sixth-order central difference.
    auto d1 = [h](const std::vector<double>& f, std::size_t i) {
        return (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2] + f[i + 3]) /
               (60.0 * h);
    };
    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const StationaryState s = prof.state(i);
        worst = std::max(worst, std::abs(residual_U(prof.params, s, d1(prof.Ups, i))));
        worst = std::max(worst, std::abs(residual_V(prof.params, s, d1(prof.Vps, i))));
    }
    return worst;
}

std::string_view to_string(EsMethod m)
{
    switch (m) {
    case EsMethod::TailScan:
        return "TailScan";
    case EsMethod::CriterionClosedForm:
        return "CriterionClosedForm";
    case EsMethod::CriterionFromProfile:
        break;
    }
    return "CriterionFromProfile";
}

double EsReport::diagnostic(const std::string& name) const
{
    for (const auto& [key, value] : diagnostics) {
        if (key == name) {
            return value;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace eshg
