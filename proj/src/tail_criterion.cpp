#include "eshg/tail_criterion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "eshg/numerics.hpp"
#include "eshg/variational.hpp"

namespace eshg::tail {

namespace {

void require_embedded(const ModelParams& p, double k)
{
    if (classify_region(p, k) != RegionClass::EmbeddedPermitted) {
        std::ostringstream msg;
        msg << "wrong region: k = " << k << " is not in the embedded-permitted band";
        fail(ErrorCode::WrongRegion, msg.str());
    }
}

double tail_denominator(const ModelParams& p, double k)
{
    const double den = 2.0 * k * (1.0 + 2.0 * p.delta()) - p.q();
    if (den == 0.0) {
        fail(ErrorCode::Degenerate, "singular denominator: 2k(1+2 delta) = q");
    }
    return den;
}

// x / sinh(x), stable near 0 and free of overflow for large x.
double x_over_sinh(double x)
{
    if (x < 1e-4) {
        return 1.0 - x * x / 6.0;
    }
    if (x > 20.0) {
        return 2.0 * x * std::exp(-x) / (1.0 - std::exp(-2.0 * x));
    }
    return x / std::sinh(x);
}

CriterionResult scan_roots(const std::function<double(double)>& f, KBracket br, int samples, CriterionMethod method)
{
    if (!(br.hi > br.lo) || samples < 2) {
        fail(ErrorCode::InvalidArgument, "criterion bracket must satisfy lo < hi with >= 2 samples");
    }
    CriterionResult res;
    res.method = method;
    for (int i = 0; i <= samples; ++i) {
        const double k = br.lo + (br.hi - br.lo) * static_cast<double>(i) / samples;
        res.residual_fn_samples.emplace_back(k, f(k));
    }
    const auto& s = res.residual_fn_samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const auto [k0, f0] = s[i];
        const auto [k1, f1] = s[i + 1];
        if (f0 == 0.0) {
            res.k_candidates.push_back(k0);
            continue;
        }
        double a = k0, b = k1, fa = f0, fb = f1;
        if (std::isfinite(f0) != std::isfinite(f1)) {
            // The function stops existing inside the cell (a folding branch); shrink to its edge.
            double in = std::isfinite(f0) ? k0 : k1;
            double out = std::isfinite(f0) ? k1 : k0;
            for (int it = 0; it < 80 && std::abs(out - in) > 1e-15 * std::abs(in); ++it) {
                const double mid = 0.5 * (in + out);
                (std::isfinite(f(mid)) ? in : out) = mid;
            }
            if (std::isfinite(f0)) {
                b = in;
                fb = f(in);
            } else {
                a = in;
                fa = f(in);
            }
        }
        if (!(fa * fb < 0.0)) {
            continue;
        }
        double root = numerics::find_root_bracketed(f, a, b, fa, fb, 1e-12);
        // One secant-slope Newton polish, kept only if it stays inside the cell and helps.
        const double h = 1e-7 * std::max(1.0, std::abs(root));
        const double slope = (f(root + h) - f(root - h)) / (2.0 * h);
        const double fr = f(root);
        if (slope != 0.0 && std::isfinite(slope)) {
            const double polished = root - fr / slope;
            if (polished > a && polished < b && std::abs(f(polished)) < std::abs(fr)) {
                root = polished;
            }
        }
        // A sign flip through a pole is not a root.
        const double scale = 1.0 + std::abs(fa) + std::abs(fb);
        if (std::abs(f(root)) > 1e-6 * scale) {
            continue;
        }
        res.k_candidates.push_back(root);
    }
    if (std::abs(s.back().second) == 0.0) {
        res.k_candidates.push_back(s.back().first);
    }
    if (res.k_candidates.empty()) {
        fail(ErrorCode::NoSolution, "no root in bracket");
    }
    return res;
}

} // namespace

std::string_view to_string(CriterionMethod m)
{
    switch (m) {
    case CriterionMethod::ClosedFormTruncated:
        return "ClosedFormTruncated";
    case CriterionMethod::ClosedFormFull:
        return "ClosedFormFull";
    case CriterionMethod::NumericProfile:
        break;
    }
    return "NumericProfile";
}

double sech_cos_integral(int n, double a)
{
    if (!(a >= 0.0)) {
        fail(ErrorCode::InvalidArgument, "sech_cos_integral needs a >= 0");
    }
    const double i2 = 2.0 * x_over_sinh(0.5 * std::numbers::pi * a);
    const double a2 = a * a;
    switch (n) {
    case 2:
        return i2;
    case 4:
        return i2 * (a2 + 4.0) / 6.0;
    case 6:
        return i2 * (a2 + 4.0) / 6.0 * (a2 + 16.0) / 20.0;
    default:
        fail(ErrorCode::InvalidArgument, "sech_cos_integral: n must be 2, 4 or 6");
    }
}

double sech_cos_integral_quadrature(int n, double a, double rel_tol)
{
    if (!(a >= 0.0) || (n != 2 && n != 4 && n != 6)) {
        fail(ErrorCode::InvalidArgument, "sech_cos_integral_quadrature: need a >= 0 and n in {2,4,6}");
    }
    // By Cauchy, the integral of sech^n(z) e^{iaz} along Im z = c equals the real-line one
    // (no poles for 0 <= c < pi/2), and e^{ia(x+ic)} = e^{-ac} e^{iax}.
    const double c = a > 1.0 ? 0.5 * std::numbers::pi - 1.0 / a : 0.0;
    auto f = [n, a, c](double x) {
        const std::complex<double> z(x, c);
        const std::complex<double> s = 1.0 / std::cosh(z);
        std::complex<double> sn = s * s;
        for (int i = 2; i < n; i += 2) {
            sn *= s * s;
        }
        return (sn * std::exp(std::complex<double>(0.0, a * x))).real();
    };
    numerics::ToleranceSpec tol;
    tol.abs_tol = 1e-300;
    tol.rel_tol = rel_tol;
    tol.max_iter = 5000;
    // The shifted integrand is even in x.
    return 2.0 * std::exp(-a * c) * numerics::quad_adaptive(f, 0.0, std::numeric_limits<double>::infinity(), tol);
}

double criterion_truncated(const ModelParams& p, double B, double k)
{
    return 4.0 * p.gamma2() * B + 3.0 * p.delta() * k / tail_denominator(p, k);
}

double criterion_full(const ModelParams& p, double A, double B, double k)
{
    require_positive_wavenumber(k);
    if (A == 0.0) {
        fail(ErrorCode::Degenerate, "criterion_full needs A != 0");
    }
    const double ratio = (B * B) / (A * A);
    const double corr = ratio * (2.0 * (8.0 * p.delta() + 1.0) * k - p.q()) / (40.0 * p.delta() * k);
    return 4.0 * p.gamma2() * B * (1.0 + corr) + 3.0 * p.delta() * k / tail_denominator(p, k);
}

KBracket default_bracket(const ModelParams& p, double eps)
{
    const double half_q = 0.5 * p.q();
    if (p.delta() > 0.0) {
        const double lo = std::max(0.0, half_q) + eps;
        const double hi = p.q() > 0.0 ? 2.0 * p.q() : lo + 2.0;
        return {lo, hi};
    }
    if (half_q <= eps) {
        fail(ErrorCode::WrongRegion, "embedded-permitted band is empty for delta < 0 and q <= 0");
    }
    return {eps, half_q - eps};
}

EsReport locate_es_truncated(const ModelParams& p)
{
    const ModelParams tp = p.with_variant(Variant::Truncated);
    if (!(tp.delta() * tp.gamma2() < 0.0)) {
        // A^2 = -3 delta k / (2 g2) is positive for k > 0 only when delta g2 < 0.
        fail(ErrorCode::NoSolution, "unphysical: the exact solution needs delta * gamma2 < 0");
    }
    const double k = va::exact_es_wavenumber(tp);
    const va::ExactAmplitudes amp = va::exact_amplitudes(tp, k);
    const va::SolitonAnsatz a{std::sqrt(amp.A2), amp.B, k};

    EsReport rep;
    rep.k_es = k;
    rep.region = classify_region(tp, k);
    rep.A = a.A;
    rep.B = a.B;
    rep.method = EsMethod::CriterionClosedForm;
    rep.b_at_min = 0.0;

    const double T = 20.0 / a.width();
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = -T + 2.0 * T * i / 4000.0;
        const StationaryState s = a.state(t);
        worst = std::max(worst, std::abs(residual_U(tp, s, a.Upp(t))));
        worst = std::max(worst, std::abs(residual_V(tp, s, a.Vpp(t))));
    }
    rep.residual_max = worst;
    rep.profile.push_back(sample_ansatz(tp, a, T, 2000));
    rep.diagnostics.emplace_back("A2", amp.A2);
    if (rep.region == RegionClass::EmbeddedPermitted) {
        rep.diagnostics.emplace_back("omega", *tail_wavenumber(tp, k));
        rep.diagnostics.emplace_back("criterion_truncated", criterion_truncated(tp, amp.B, k));
    }
    rep.candidates.push_back({k, 0.0, true, "closed form"});
    return rep;
}

CriterionResult locate_es_full(const ModelParams& p, double A, double B, KBracket bracket, int samples)
{
    require_embedded(p, bracket.lo);
    require_embedded(p, bracket.hi);
    return scan_roots([&](double k) { return criterion_full(p, A, B, k); }, bracket, samples,
                      CriterionMethod::ClosedFormFull);
}

CriterionResult locate_es_va_chain(const ModelParams& p, KBracket bracket, int samples)
{
    require_embedded(p, bracket.lo);
    require_embedded(p, bracket.hi);
    if (p.gamma2() == 0.0) {
        fail(ErrorCode::NoSolution, "VA chain needs gamma2 != 0");
    }
    const ModelParams tp = p.with_variant(Variant::Truncated);
    auto f = [&](double k) {
        const auto sols = va::solve_biquadratic(tp, k);
        if (sols.empty()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double target = -3.0 * tp.delta() * k / (2.0 * tp.gamma2());
        const auto best = std::min_element(sols.begin(), sols.end(), [&](const auto& x, const auto& y) {
            return std::abs(x.A2 - target) < std::abs(y.A2 - target);
        });
        return criterion_truncated(tp, best->ansatz.B, k);
    };
    return scan_roots(f, bracket, samples, CriterionMethod::ClosedFormTruncated);
}

double orthogonality_integral(const ModelParams& p, const FieldProfile& prof, double k, double decay_threshold)
{
    require_embedded(p, k);
    prof.validate();
    const double omega = *tail_wavenumber(p, k);
    const double umax = prof.max_abs_U();
    if (umax == 0.0) {
        return 0.0;
    }
    if (std::abs(prof.Us.back()) > decay_threshold * umax) {
        std::ostringstream msg;
        msg << "domain too short: |U(T)| / max|U| = " << std::abs(prof.Us.back()) / umax;
        fail(ErrorCode::DomainTooShort, msg.str());
    }
    const std::size_t n = prof.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = sh_nonlinear_source(p, prof.Us[i], prof.Vs[i]) * std::cos(omega * prof.ts[i]);
    }
    auto trapezoid = [&](std::size_t stride) {
        double s = 0.0;
        std::size_t i = 0;
        for (; i + stride < n; i += stride) {
            s += 0.5 * (g[i] + g[i + stride]) * (prof.ts[i + stride] - prof.ts[i]);
        }
        if (i + 1 < n) {
            s += 0.5 * (g[i] + g[n - 1]) * (prof.ts[n - 1] - prof.ts[i]);
        }
        return s;
    };
    const double fine = trapezoid(1);
    if (n < 3) {
        return 2.0 * fine;
    }
    const double coarse = trapezoid(2);
    return 2.0 * (fine + (fine - coarse) / 3.0);
}

double orthogonality_closed_form(const ModelParams& p, double A, double B, double k)
{
    require_embedded(p, k);
    const double beta = fh_decay_rate(k);
    const double a = *tail_wavenumber(p, k) / beta;
    double bracket = 0.5 * A * A * sech_cos_integral(2, a) + 4.0 * p.gamma2() * A * A * B * sech_cos_integral(4, a);
    if (p.is_full()) {
        bracket += 2.0 * p.gamma2() * B * B * B * sech_cos_integral(6, a);
    }
    return bracket / beta;
}

} // namespace eshg::tail
