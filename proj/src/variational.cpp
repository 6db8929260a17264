#include "eshg/variational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eshg::va {

namespace {

double sech(double x)
{
    // 1/cosh overflows gracefully to 0 for |x| > ~710.
    return 1.0 / std::cosh(x);
}

} // namespace

double SolitonAnsatz::width() const
{
    return fh_decay_rate(k);
}

double SolitonAnsatz::U(double t) const
{
    return A * sech(width() * t);
}

double SolitonAnsatz::V(double t) const
{
    const double s = sech(width() * t);
    return B * s * s;
}

double SolitonAnsatz::Up(double t) const
{
    const double b = width();
    return -A * b * sech(b * t) * std::tanh(b * t);
}

double SolitonAnsatz::Vp(double t) const
{
    const double b = width();
    const double s = sech(b * t);
    return -2.0 * B * b * s * s * std::tanh(b * t);
}

double SolitonAnsatz::Upp(double t) const
{
    const double b = width();
    const double s = sech(b * t);
    return A * b * b * (s - 2.0 * s * s * s);
}

double SolitonAnsatz::Vpp(double t) const
{
    const double b = width();
    const double s2 = sech(b * t) * sech(b * t);
    return B * b * b * (4.0 * s2 - 6.0 * s2 * s2);
}

StationaryState SolitonAnsatz::state(double t) const
{
    return {k, U(t), Up(t), V(t), Vp(t)};
}

double detuning_bracket(const ModelParams& p, double k)
{
    // Scaled by 5 so the cancellation-prone sum matches the gamma1 = 0 closed form term for term.
    return (2.0 * (5.0 - 2.0 * p.delta()) * k - 5.0 * p.q()) / 5.0;
}

double effective_lagrangian_frozen_term(const ModelParams& p, const SolitonAnsatz& a)
{
    require_positive_wavenumber(a.k);
    return (32.0 / 5.0) * p.gamma2() * a.A * a.A * a.B * a.B / (3.0 * a.width());
}

double effective_lagrangian(const ModelParams& p, const SolitonAnsatz& a)
{
    require_positive_wavenumber(a.k);
    const double A2 = a.A * a.A;
    const double B2 = a.B * a.B;
    const double body = -4.0 * a.k * A2 - 2.0 * detuning_bracket(p, a.k) * B2 + 2.0 * A2 * a.B +
                        p.gamma1() * A2 * A2;
    return body / (3.0 * a.width()) + effective_lagrangian_frozen_term(p, a);
}

double eliminate_B(const ModelParams& p, double A, double k)
{
    require_positive_wavenumber(k);
    return 2.0 * k - p.gamma1() * A * A;
}

Biquadratic amplitude_equation(const ModelParams& p, double k)
{
    const double bracket = detuning_bracket(p, k);
    return {
        (32.0 / 5.0) * p.gamma1() * p.gamma2(),
        -(5.0 + 64.0 * k * p.gamma2() + 10.0 * p.gamma1() * bracket) / 5.0,
        4.0 * k * bracket,
    };
}

std::vector<double> amplitude_roots(const ModelParams& p, double k)
{
    require_positive_wavenumber(k);
    const Biquadratic c = amplitude_equation(p, k);
    std::vector<double> roots;
    if (c.a4 == 0.0) {
        if (c.a2 == 0.0) {
            fail(ErrorCode::Degenerate, "degenerate quadratic: quartic and quadratic coefficients vanish");
        }
        roots.push_back(-c.a0 / c.a2);
        return roots;
    }
    const double disc = c.a2 * c.a2 - 4.0 * c.a4 * c.a0;
    if (disc < 0.0) {
        return roots;
    }
    // Larger-magnitude root first, the other from the product of roots.
    const double qq = -0.5 * (c.a2 + std::copysign(std::sqrt(disc), c.a2));
    if (qq == 0.0) {
        roots.push_back(0.0);
        return roots;
    }
    roots.push_back(qq / c.a4);
    roots.push_back(c.a0 / qq);
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<VaSolution> solve_biquadratic(const ModelParams& p, double k)
{
    std::vector<VaSolution> out;
    for (double A2 : amplitude_roots(p, k)) {
        if (!(A2 > 0.0)) {
            continue;
        }
        VaSolution s;
        s.A2 = A2;
        s.ansatz.A = std::sqrt(A2);
        s.ansatz.k = k;
        s.ansatz.B = eliminate_B(p, s.ansatz.A, k);
        s.branch = static_cast<int>(out.size());
        s.leff = effective_lagrangian(p, s.ansatz);
        out.push_back(s);
    }
    return out;
}

double single_root_gamma1_zero(const ModelParams& p, double k)
{
    const double den = 5.0 + 64.0 * k * p.gamma2();
    if (den == 0.0) {
        fail(ErrorCode::Degenerate, "degenerate quadratic: 5 + 64 k gamma2 = 0");
    }
    return 4.0 * k * (2.0 * (5.0 - 2.0 * p.delta()) * k - 5.0 * p.q()) / den;
}

double exact_es_wavenumber(const ModelParams& p)
{
    const double d1 = 1.0 + 2.0 * p.delta();
    const double d2 = 4.0 * p.gamma2() + 3.0 * p.delta() * p.gamma1();
    if (d1 == 0.0 || d2 == 0.0) {
        fail(ErrorCode::NoSolution, "invalid: singular denominator in the exact ES wavenumber");
    }
    const double k = 0.5 / d1 * (p.q() - 1.5 * p.delta() / d2);
    if (!(k > 0.0)) {
        std::ostringstream msg;
        msg << "invalid: exact ES wavenumber is non-positive (k = " << k << ")";
        fail(ErrorCode::NoSolution, msg.str());
    }
    return k;
}

ExactAmplitudes exact_amplitudes(const ModelParams& p, double k)
{
    require_positive_wavenumber(k);
    if (p.gamma2() == 0.0) {
        fail(ErrorCode::NoSolution, "unphysical: exact solution requires gamma2 != 0");
    }
    const double A2 = -3.0 * p.delta() * k / (2.0 * p.gamma2());
    if (!(A2 > 0.0)) {
        std::ostringstream msg;
        msg << "unphysical: A^2 = " << A2 << " (needs delta*gamma2 < 0)";
        fail(ErrorCode::NoSolution, msg.str());
    }
    return {A2, 2.0 * k - p.gamma1() * A2};
}

} // namespace eshg::va
