#include "eshg/model.hpp"

#include <cmath>
#include <string>

namespace eshg {

std::string_view to_string(Variant v)
{
    return v == Variant::Full ? "full" : "truncated";
}

Variant variant_from_string(std::string_view name)
{
    if (name == "full") {
        return Variant::Full;
    }
    if (name == "truncated") {
        return Variant::Truncated;
    }
    fail(ErrorCode::InvalidArgument, "unknown model variant '" + std::string(name) + "' (expected full|truncated)");
}

std::string_view to_string(RegionClass r)
{
    switch (r) {
    case RegionClass::Ordinary:
        return "Ordinary";
    case RegionClass::EmbeddedPermitted:
        return "EmbeddedPermitted";
    case RegionClass::Neither:
        break;
    }
    return "Neither";
}

ModelParams::ModelParams(double delta, double q, double gamma1, double gamma2, Variant variant)
    : delta_(delta), q_(q), gamma1_(gamma1), gamma2_(gamma2), variant_(variant)
{
    if (!std::isfinite(delta) || !std::isfinite(q) || !std::isfinite(gamma1) || !std::isfinite(gamma2)) {
        fail(ErrorCode::InvalidArgument, "model parameters must be finite");
    }
    if (delta == 0.0) {
        fail(ErrorCode::InvalidArgument, "delta must be nonzero");
    }
}

double residual_U(const ModelParams& p, const StationaryState& s, double Upp)
{
    double r = -s.k * s.U + 0.5 * Upp + s.U * s.V + p.gamma1() * s.U * s.U * s.U;
    if (p.is_full()) {
        r += 2.0 * p.gamma1() * s.V * s.V * s.U;
    }
    return r;
}

double residual_V(const ModelParams& p, const StationaryState& s, double Vpp)
{
    const double linear = -2.0 * s.k * s.V - 0.5 * p.delta() * Vpp + p.q() * s.V;
    return linear + sh_nonlinear_source(p, s.U, s.V);
}

double sh_nonlinear_source(const ModelParams& p, double U, double V)
{
    double n = 0.5 * U * U + 4.0 * p.gamma2() * U * U * V;
    if (p.is_full()) {
        n += 2.0 * p.gamma2() * V * V * V;
    }
    return n;
}

State4 rhs_first_order(const ModelParams& p, double k, const State4& y)
{
    return rhs_first_order_blended(p, k, y, p.is_full() ? 1.0 : 0.0);
}

State4 rhs_first_order_blended(const ModelParams& p, double k, const State4& y, double full_weight)
{
    const double U = y[0];
    const double V = y[2];
    const double fh = k * U - U * V - p.gamma1() * U * U * U - full_weight * 2.0 * p.gamma1() * V * V * U;
    const double sh = (p.q() - 2.0 * k) * V + 0.5 * U * U + 4.0 * p.gamma2() * U * U * V +
                      full_weight * 2.0 * p.gamma2() * V * V * V;
    return {y[1], 2.0 * fh, y[3], (2.0 / p.delta()) * sh};
}

std::optional<double> tail_wavenumber(const ModelParams& p, double k)
{
    const double w2 = (2.0 / p.delta()) * (2.0 * k - p.q());
    if (!(w2 > 0.0)) {
        return std::nullopt;
    }
    return std::sqrt(w2);
}

std::optional<double> sh_decay_rate(const ModelParams& p, double k)
{
    const double k2 = (2.0 / p.delta()) * (p.q() - 2.0 * k);
    if (!(k2 > 0.0)) {
        return std::nullopt;
    }
    return std::sqrt(k2);
}

double fh_decay_rate(double k)
{
    require_positive_wavenumber(k);
    return std::sqrt(2.0 * k);
}

RegionClass classify_region(const ModelParams& p, double k)
{
    if (!(k > 0.0)) {
        return RegionClass::Neither;
    }
    const double half_q = 0.5 * p.q();
    const bool below = k < half_q;
    const bool above = k > std::max(0.0, half_q);
    if (p.delta() > 0.0) {
        if (below) {
            return RegionClass::Ordinary;
        }
        if (above) {
            return RegionClass::EmbeddedPermitted;
        }
    } else {
        if (above) {
            return RegionClass::Ordinary;
        }
        if (below) {
            return RegionClass::EmbeddedPermitted;
        }
    }
    return RegionClass::Neither;
}

void require_positive_wavenumber(double k)
{
    if (!std::isfinite(k) || !(k > 0.0)) {
        fail(ErrorCode::InvalidArgument, "wavenumber k must be positive (got " + std::to_string(k) + ")");
    }
}

} // namespace eshg
