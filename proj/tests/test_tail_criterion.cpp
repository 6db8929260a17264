#include <doctest.h>

#include <cmath>
#include <random>

#include "eshg/numerics.hpp"
#include "eshg/profile.hpp"
#include "eshg/tail_criterion.hpp"
#include "eshg/variational.hpp"

using namespace eshg;
using namespace eshg::tail;

namespace {

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

double sech_cos_oracle(int n, double a)
{
    auto f = [n, a](double x) { return std::pow(1.0 / std::cosh(x), n) * std::cos(a * x); };
    return numerics::quad_adaptive(f, -INFINITY, INFINITY, {1e-15, 1e-13, 4000});
}

const ModelParams kKerr(1, 1, -0.05, -0.05);
const ModelParams kKerrFull(1, 1, -0.05, -0.05, Variant::Full);

} // namespace

TEST_CASE("sech power integrals: limits at a = 0")
{
    CHECK(sech_cos_integral(2, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sech_cos_integral(4, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(sech_cos_integral(6, 0.0) == doctest::Approx(16.0 / 15.0).epsilon(1e-15));
    CHECK(sech_cos_integral(2, 1e-12) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(sech_cos_integral(3, 1.0), Error);
    CHECK_THROWS_AS(sech_cos_integral(2, -1.0), Error);
}

TEST_CASE("sech power integrals against real-line quadrature")
{
    for (double a : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(rel(sech_cos_integral(4, a), sech_cos_oracle(4, a)) < 1e-10);
    }
    CHECK(sech_cos_integral(4, 1.0) == doctest::Approx(1.137615750551).epsilon(1e-12));
}

TEST_CASE("property: closed forms match the contour quadrature on a log grid")
{
    for (int n : {2, 4, 6}) {
        for (int i = 0; i < 30; ++i) {
            const double a = 1e-3 * std::pow(2e4, i / 29.0);
            CHECK(rel(sech_cos_integral(n, a), sech_cos_integral_quadrature(n, a)) < 1e-9);
        }
    }
}

TEST_CASE("truncated criterion")
{
    const ModelParams p(1, 1, 0, -0.25);
    CHECK(std::abs(criterion_truncated(p, 5.0 / 6.0, 5.0 / 12.0)) < 1e-15);
    const ModelParams q(1, 1, 0, -0.25);
    const double k = 0.8;
    CHECK(criterion_truncated(q, 0.0, k) == doctest::Approx(3 * k / (6 * k - 1)));
    CHECK(criterion_truncated(kKerr, 1.3, 0.8) == criterion_truncated(kKerr, 1.3, 0.8));
    CHECK_THROWS_AS(criterion_truncated(kKerr, 1.0, 1.0 / 6.0), Error);
    const ModelParams neg(-0.25, 1, 0, 0.1);
    CHECK_THROWS_AS(criterion_truncated(neg, 1.0, 1.0), Error);
}

TEST_CASE("full criterion")
{
    const double A = 3.794;
    const double B = 2.735;
    CHECK(criterion_full(kKerrFull, 1e9, 1.0, 0.8) == doctest::Approx(criterion_truncated(kKerrFull, 1.0, 0.8)));
    CHECK(std::abs(criterion_full(kKerrFull, A, B, 0.688)) < 0.05);
    const ModelParams free(1, 1, -0.05, 0.0, Variant::Full);
    CHECK(criterion_full(free, A, B, 0.8) == doctest::Approx(3 * 0.8 / (6 * 0.8 - 1)));
    CHECK(criterion_full(kKerrFull, 2 * A, 2 * B, 0.7) != doctest::Approx(criterion_full(kKerrFull, A, B, 0.7)));
    CHECK_THROWS_AS(criterion_full(kKerrFull, 0.0, B, 0.7), Error);
}

TEST_CASE("property: full minus truncated criterion is the B^3/A^2 term")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int i = 0; i < 300; ++i) {
        const double delta = u(rng);
        const ModelParams p(delta, u(rng) - 1.0, -0.1 * u(rng), -0.2 * u(rng));
        const double k = std::max(0.0, p.q() / 2) + u(rng);
        const double A = u(rng) * 3;
        const double B = u(rng) * 3;
        const double diff = criterion_full(p, A, B, k) - criterion_truncated(p, B, k);
        const double expect =
            4 * p.gamma2() * (B * B * B / (A * A)) * (2 * (8 * delta + 1) * k - p.q()) / (40 * delta * k);
        CHECK(diff == doctest::Approx(expect).epsilon(1e-11).scale(1e-3));
    }
}

TEST_CASE("default bracket")
{
    const KBracket b = default_bracket(ModelParams(1, 1, 0, -0.1));
    CHECK(b.lo == doctest::Approx(0.5 + 1e-6));
    CHECK(b.hi == doctest::Approx(2.0));
    const KBracket n = default_bracket(ModelParams(-1, 1, 0, -0.1));
    CHECK(n.lo > 0);
    CHECK(n.hi < 0.5);
}

TEST_CASE("locate ES in the truncated model")
{
    const EsReport r = locate_es_truncated(kKerr);
    CHECK(r.k_es == doctest::Approx(37.0 / 42.0).epsilon(1e-14));
    CHECK(r.region == RegionClass::EmbeddedPermitted);
    CHECK(r.method == EsMethod::CriterionClosedForm);
    CHECK(r.residual_max < 1e-9);
    CHECK(r.A * r.A == doctest::Approx(26.4286).epsilon(1e-5));

    const EsReport o = locate_es_truncated(ModelParams(1, 1, 0, -0.25));
    CHECK(o.k_es == doctest::Approx(5.0 / 12.0));
    CHECK(o.region == RegionClass::Ordinary);

    try {
        (void)locate_es_truncated(ModelParams(1, 1, 0, 0.25));
        FAIL("expected unphysical");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSolution);
    }
    CHECK_THROWS_AS(locate_es_truncated(ModelParams(1, 1, -0.05, 0.0)), Error);
}

TEST_CASE("truncated criterion root by bisection equals the closed form")
{
    const ModelParams p(1, 1, 0, -0.25);
    auto f = [&](double k) { return criterion_truncated(p, va::exact_amplitudes(p, k).B, k); };
    CHECK(numerics::find_root_bracketed(f, 0.2, 0.6, 1e-14) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));

    // The VA branch also meets the criterion at k = 5/6, where the chain is not the exact solution.
    const CriterionResult c = locate_es_va_chain(kKerr, {0.6, 1.1});
    REQUIRE(c.k_candidates.size() == 2);
    CHECK(rel(c.k_candidates[0], 5.0 / 6.0) < 1e-10);
    CHECK(rel(c.k_candidates[1], 37.0 / 42.0) < 1e-10);
    CHECK(c.method == CriterionMethod::ClosedFormTruncated);
}

TEST_CASE("VA chain finds a root where the branch folds just past it")
{
    // Both VA branches merge slightly above k_ES and vanish; the root sits next to the edge.
    const ModelParams p(0.982383, 0.104519, -0.0671318, -0.401938);
    const double k = va::exact_es_wavenumber(p);
    CHECK(va::solve_biquadratic(p, 1.02 * k).empty());
    const CriterionResult c = locate_es_va_chain(p, {0.9 * k, 1.1 * k});
    REQUIRE(c.k_candidates.size() == 1);
    CHECK(rel(c.k_candidates[0], k) < 1e-9);
}

TEST_CASE("property: criterion root matches the closed form for random draws")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int n = 0;
    for (int i = 0; i < 400 && n < 20; ++i) {
        const ModelParams p(0.3 + 1.5 * u(rng), 0.2 + 1.5 * u(rng), -0.1 * u(rng), -0.02 - 0.3 * u(rng));
        double k = 0.0;
        try {
            k = va::exact_es_wavenumber(p);
        } catch (const Error&) {
            continue;
        }
        if (!(k > 1.2 * p.q() / 2)) {
            continue;
        }
        const CriterionResult c = locate_es_va_chain(p, {0.9 * k, 1.1 * k});
        REQUIRE_FALSE(c.k_candidates.empty());
        double best = INFINITY;
        for (double r : c.k_candidates) {
            best = std::min(best, rel(r, k));
        }
        CHECK(best < 1e-10);
        // The sign of the truncated criterion at the exact B flips across k_ES.
        const double B = va::exact_amplitudes(p, k).B;
        CHECK(criterion_truncated(p, B, 0.95 * k) * criterion_truncated(p, B, 1.05 * k) < 0);
        ++n;
    }
    CHECK(n == 20);
}

TEST_CASE("locate ES in the full model from given amplitudes")
{
    const CriterionResult c = locate_es_full(kKerrFull, 3.794, 2.735, {0.55, 1.2});
    REQUIRE(c.k_candidates.size() == 1);
    CHECK(c.k_candidates[0] == doctest::Approx(0.67366611).epsilon(1e-7));
    CHECK(c.method == CriterionMethod::ClosedFormFull);
    CHECK_FALSE(c.residual_fn_samples.empty());
    for (double k : c.k_candidates) {
        CHECK(classify_region(kKerrFull, k) == RegionClass::EmbeddedPermitted);
    }
    try {
        (void)locate_es_full(kKerrFull, 3.794, 2.735, {0.9, 1.2});
        FAIL("expected no root");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSolution);
        CHECK(std::string(e.what()).find("no root in bracket") != std::string::npos);
    }
    CHECK_THROWS_AS(locate_es_full(kKerrFull, 3.794, 2.735, {0.2, 0.4}), Error);
}

TEST_CASE("orthogonality integral")
{
    const double k = 37.0 / 42.0;
    const va::ExactAmplitudes e = va::exact_amplitudes(kKerr, k);
    const va::SolitonAnsatz a{std::sqrt(e.A2), e.B, k};
    const FieldProfile prof = sample_ansatz(kKerr, a, 30.0, 6000);
    const double scale = 0.5 * e.A2;
    CHECK(std::abs(orthogonality_integral(kKerr, prof, k)) < 1e-8 * scale);

    FieldProfile zero(kKerr, k);
    for (int i = 0; i <= 100; ++i) {
        zero.push(0.1 * i, 0, 0, 0, 0);
    }
    CHECK(orthogonality_integral(kKerr, zero, k) == 0.0);

    const FieldProfile shortp = sample_ansatz(kKerr, a, 2.0, 400);
    try {
        (void)orthogonality_integral(kKerr, shortp, k);
        FAIL("expected domain too short");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::DomainTooShort);
    }
}

TEST_CASE("property: numeric orthogonality integral reproduces the closed form")
{
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Variant v = i % 2 ? Variant::Full : Variant::Truncated;
        const ModelParams p(0.3 + 1.5 * u(rng), 1.5 * u(rng) - 0.5, -0.2 * u(rng), -0.3 * u(rng), v);
        const double k = std::max(0.0, p.q() / 2) + 0.05 + u(rng);
        const va::SolitonAnsatz a{0.5 + 3 * u(rng), 0.2 + 3 * u(rng), k};
        const double T = 22.0 / std::sqrt(2 * k);
        const FieldProfile prof = sample_ansatz(p, a, T, 8000);
        const double num = orthogonality_integral(p, prof, k);
        const double closed = orthogonality_closed_form(p, a.A, a.B, k);
        const double scale = a.A * a.A / std::sqrt(2 * k) * (1 + std::abs(p.gamma2()) * (a.B + a.B * a.B * a.B / (a.A * a.A)));
        CHECK(std::abs(num - closed) < 1e-8 * scale);
    }
}
