#pragma once

#include <vector>

#include "eshg/model.hpp"

namespace eshg::va {

/// U = A sech(sqrt(2k) t), V = B sech^2(sqrt(2k) t).
struct SolitonAnsatz {
    double A = 0.0;
    double B = 0.0;
    double k = 0.0;

    [[nodiscard]] double width() const;   // sqrt(2k)
    [[nodiscard]] double U(double t) const;
    [[nodiscard]] double V(double t) const;
    [[nodiscard]] double Up(double t) const;
    [[nodiscard]] double Vp(double t) const;
    [[nodiscard]] double Upp(double t) const;
    [[nodiscard]] double Vpp(double t) const;
    [[nodiscard]] StationaryState state(double t) const;
};

struct VaSolution {
    SolitonAnsatz ansatz;
    double A2 = 0.0;
    int branch = 0;   // index into the ascending list of positive A^2 roots
    double leff = 0.0;
};

/// Effective Lagrangian of the truncated system on the sech/sech^2 ansatz:
/// [ -4kA^2 - 2(2(1-2delta/5)k - q)B^2 + 2A^2B + g1 A^4 + (32/5) g2 A^2 B^2 ] / (3 sqrt(2k)).
double effective_lagrangian(const ModelParams& p, const SolitonAnsatz& a);

/// The gamma2 A^2 B^2 cross term of the effective Lagrangian on its own. Under the
/// semi-Lagrangian rule it is varied in B only.
double effective_lagrangian_frozen_term(const ModelParams& p, const SolitonAnsatz& a);

/// 2(1 - 2 delta/5) k - q, the bracket shared by the effective Lagrangian and the amplitude equation.
double detuning_bracket(const ModelParams& p, double k);

/// B = 2k - g1 A^2 (the A-variation with the frozen term excluded).
double eliminate_B(const ModelParams& p, double A, double k);

/// Coefficients (quartic, quadratic, constant) of the amplitude equation in A^2.
struct Biquadratic {
    double a4 = 0.0;
    double a2 = 0.0;
    double a0 = 0.0;
};
Biquadratic amplitude_equation(const ModelParams& p, double k);

/// Real roots A^2 of the amplitude equation (any sign), ascending. Throws Degenerate
/// when both a4 and a2 vanish.
std::vector<double> amplitude_roots(const ModelParams& p, double k);

/// Physical VA solutions (A^2 > 0), ascending in A^2.
std::vector<VaSolution> solve_biquadratic(const ModelParams& p, double k);

/// Closed form for g1 = 0: A^2 = 4k[2(5 - 2 delta)k - 5q] / (5 + 64 k g2).
double single_root_gamma1_zero(const ModelParams& p, double k);

/// ES wavenumber of the exact truncated solution:
/// k = (1/2)(1+2 delta)^-1 [q - (3/2) delta (4 g2 + 3 delta g1)^-1]. Throws NoSolution when
/// a denominator vanishes or k <= 0.
double exact_es_wavenumber(const ModelParams& p);

struct ExactAmplitudes {
    double A2 = 0.0;
    double B = 0.0;
};

/// A^2 = -3 delta k / (2 g2), B = 2k - g1 A^2. Throws NoSolution when A^2 <= 0 or g2 = 0.
ExactAmplitudes exact_amplitudes(const ModelParams& p, double k);

} // namespace eshg::va
