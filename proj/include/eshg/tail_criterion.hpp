#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "eshg/model.hpp"
#include "eshg/profile.hpp"

namespace eshg::tail {

/// Small oscillating SH tail b cos(omega |t| + psi). The criterion is evaluated at psi = 0.
struct TailAnsatz {
    double b = 0.0;
    double psi = 0.0;
    double omega = 0.0;
};

enum class CriterionMethod { ClosedFormTruncated, ClosedFormFull, NumericProfile };

std::string_view to_string(CriterionMethod m);

struct CriterionResult {
    std::vector<double> k_candidates;
    std::vector<std::pair<double, double>> residual_fn_samples;
    CriterionMethod method = CriterionMethod::ClosedFormFull;
};

struct KBracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// I_n(a) = integral over the real line of sech^n(x) cos(a x), n in {2, 4, 6}.
double sech_cos_integral(int n, double a);

/// The same integral by adaptive quadrature, used as an independent check. The path is
/// shifted to Im x = c (c -> pi/2 as a grows) so the exponentially small result is not
/// formed by cancellation on the real line.
double sech_cos_integral_quadrature(int n, double a, double rel_tol = 1e-13);

/// f(k) = 4 g2 B + 3 delta k / (2k(1+2 delta) - q). Evaluated for any k; only the root
/// search restricts k to the embedded-permitted band. Throws Degenerate on the singular denominator.
double criterion_truncated(const ModelParams& p, double B, double k);

/// g(k) = 4 g2 B [1 + (B^2/A^2)(2(8 delta + 1)k - q)/(40 delta k)] + 3 delta k / (2k(1+2 delta) - q).
double criterion_full(const ModelParams& p, double A, double B, double k);

/// (q/2 + eps, 2q) for delta > 0; (eps, q/2 - eps) for delta < 0.
KBracket default_bracket(const ModelParams& p, double eps = 1e-6);

/// The exact truncated solution, labeled by region, with analytic profile and residuals.
EsReport locate_es_truncated(const ModelParams& p);

/// All sign-change roots of criterion_full in the bracket.
CriterionResult locate_es_full(const ModelParams& p, double A, double B, KBracket bracket, int samples = 400);

/// Roots of criterion_truncated with B(k) taken from the VA amplitude equation rather
/// than from the closed-form wavenumber. The VA branch closest to -3 delta k/(2 g2) is followed.
CriterionResult locate_es_va_chain(const ModelParams& p, KBracket bracket, int samples = 400);

/// Integral over the real line of the SH nonlinear source times cos(omega t) for an even
/// profile sampled on [0, T]. Trapezoid on the profile grid with one Richardson step.
/// Throws DomainTooShort if |U(T)| exceeds decay_threshold * max|U|.
double orthogonality_integral(const ModelParams& p, const FieldProfile& prof, double k,
                              double decay_threshold = 1e-6);

/// (A^2/beta)[I2/2 + 4 g2 B I4 (+ 2 g2 (B^3/A^2) I6)] for the sech/sech^2 ansatz.
double orthogonality_closed_form(const ModelParams& p, double A, double B, double k);

} // namespace eshg::tail
