#pragma once

#include <optional>
#include <string_view>

#include "eshg/numerics.hpp"

namespace eshg {

enum class Variant { Full, Truncated };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Physical parameters of the chi(2):chi(3) system. The SH dispersion `delta`
/// must be nonzero; everything else is unconstrained.
class ModelParams {
public:
    ModelParams(double delta, double q, double gamma1, double gamma2, Variant variant = Variant::Truncated);

    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    [[nodiscard]] double gamma1() const noexcept { return gamma1_; }
    [[nodiscard]] double gamma2() const noexcept { return gamma2_; }
    [[nodiscard]] Variant variant() const noexcept { return variant_; }
    [[nodiscard]] bool is_full() const noexcept { return variant_ == Variant::Full; }

    /// Kerr coefficients of opposite sign are physically unusual but the equations
    /// stay well-posed, so this is only reported as a warning.
    [[nodiscard]] bool kerr_signs_consistent() const noexcept { return gamma1_ * gamma2_ >= 0.0; }

    [[nodiscard]] ModelParams with_variant(Variant v) const { return {delta_, q_, gamma1_, gamma2_, v}; }

private:
    double delta_;
    double q_;
    double gamma1_;
    double gamma2_;
    Variant variant_;
};

struct StationaryState {
    double k = 0.0;
    double U = 0.0;
    double Up = 0.0;
    double V = 0.0;
    double Vp = 0.0;
};

enum class RegionClass { Ordinary, EmbeddedPermitted, Neither };

std::string_view to_string(RegionClass r);

/// (U, U', V, V'): the first-order form of the stationary system.
using State4 = numerics::Vec<4>;

/// FH stationary equation: -kU + U''/2 + UV + g1 U^3 (+ 2 g1 V^2 U for the full model).
double residual_U(const ModelParams& p, const StationaryState& s, double Upp);

/// SH stationary equation: -2kV - (delta/2)V'' + qV + U^2/2 + 4 g2 U^2 V (+ 2 g2 V^3 for the full model).
double residual_V(const ModelParams& p, const StationaryState& s, double Vpp);

/// Nonlinear part of the SH equation (the source that the tail criterion projects).
double sh_nonlinear_source(const ModelParams& p, double U, double V);

/// Derivative of (U, U', V, V') solved explicitly for U'' and V''.
State4 rhs_first_order(const ModelParams& p, double k, const State4& y);

/// As rhs_first_order, with the full-model-only terms (2 g1 V^2 U, 2 g2 V^3) scaled by
/// `full_weight`: 0 gives the truncated system, 1 the full one. Used to continue
/// solutions from the truncated model into the full model.
State4 rhs_first_order_blended(const ModelParams& p, double k, const State4& y, double full_weight);

/// Wavenumber of the free SH radiation, sqrt((2/delta)(2k - q)); empty when the
/// SH field decays instead of radiating.
std::optional<double> tail_wavenumber(const ModelParams& p, double k);

/// Exponential decay rate of the SH field, sqrt((2/delta)(q - 2k)); empty inside the SH continuum.
std::optional<double> sh_decay_rate(const ModelParams& p, double k);

/// FH decay rate sqrt(2k); requires k > 0.
double fh_decay_rate(double k);

RegionClass classify_region(const ModelParams& p, double k);

/// Throws InvalidArgument for k <= 0 (or non-finite); soliton searches call this first.
void require_positive_wavenumber(double k);

} // namespace eshg
