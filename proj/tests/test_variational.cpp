#include <doctest.h>

#include <cmath>
#include <random>

#include "eshg/numerics.hpp"
#include "eshg/variational.hpp"

using namespace eshg;
using namespace eshg::va;

namespace {

// Half the integral of the truncated Lagrangian density over the ansatz.
double lagrangian_quadrature(const ModelParams& p, const SolitonAnsatz& a)
{
    const double k = a.k;
    auto density = [&](double t) {
        const double U = a.U(t);
        const double V = a.V(t);
        const double Up = a.Up(t);
        const double Vp = a.Vp(t);
        return -k * U * U - 0.5 * Up * Up + U * U * V + 0.5 * p.gamma1() * U * U * U * U +
               (p.q() - 2 * k) * V * V + 0.5 * p.delta() * Vp * Vp + 4 * p.gamma2() * U * U * V * V;
    };
    // Integrate in s = width * t so the tails decay like exp(-2|s|) or faster.
    const double w = a.width();
    auto scaled = [&](double s) { return density(s / w) / w; };
    return 0.5 * numerics::quad_adaptive(scaled, -INFINITY, INFINITY, {1e-14, 1e-13, 4000});
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("ansatz shapes and derivatives")
{
    const SolitonAnsatz a{1.3, 0.7, 0.4};
    CHECK(a.width() == doctest::Approx(std::sqrt(0.8)));
    CHECK(a.U(0) == doctest::Approx(1.3));
    CHECK(a.V(0) == doctest::Approx(0.7));
    const double h = 1e-5;
    for (double t : {-2.0, 0.3, 1.7}) {
        CHECK(a.Up(t) == doctest::Approx((a.U(t + h) - a.U(t - h)) / (2 * h)).epsilon(1e-8));
        CHECK(a.Vpp(t) == doctest::Approx((a.Vp(t + h) - a.Vp(t - h)) / (2 * h)).epsilon(1e-7));
        CHECK(a.Upp(t) == doctest::Approx((a.Up(t + h) - a.Up(t - h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("effective Lagrangian against quadrature of the density")
{
    CHECK(effective_lagrangian(ModelParams(1, 1, 0, -0.25), {0, 0, 0.5}) == 0.0);

    const ModelParams p(1, 1, 0, -0.25);
    const SolitonAnsatz exact{std::sqrt(2.5), 5.0 / 6.0, 5.0 / 12.0};
    CHECK(rel(effective_lagrangian(p, exact), lagrangian_quadrature(p, exact)) < 1e-8);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 20; ++i) {
        const ModelParams g(u(rng) + 2.0, u(rng), u(rng), 0.0);
        const SolitonAnsatz a{u(rng), u(rng), std::abs(u(rng)) + 0.1};
        CHECK(std::abs(effective_lagrangian(g, a) - lagrangian_quadrature(g, a)) <
              1e-10 * (1.0 + std::abs(lagrangian_quadrature(g, a))));
    }
}

TEST_CASE("eliminate B")
{
    const ModelParams g0(1, 1, 0, -0.25);
    CHECK(eliminate_B(g0, 0.3, 0.25) == doctest::Approx(0.5));
    CHECK(eliminate_B(g0, 7.0, 0.25) == doctest::Approx(0.5));
    const ModelParams p(1, 1, -0.05, -0.05);
    const double k = 37.0 / 42.0;
    CHECK(eliminate_B(p, std::sqrt(26.43), k) == doctest::Approx(3.083).epsilon(1e-3));
    CHECK(eliminate_B(p, 0.0, k) == doctest::Approx(2 * k));
}

TEST_CASE("biquadratic solutions")
{
    const ModelParams p(1, 1, 0, -0.25);
    const auto s = solve_biquadratic(p, 5.0 / 12.0);
    REQUIRE(s.size() == 1);
    CHECK(s[0].A2 == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(s[0].ansatz.B == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
    CHECK(s[0].branch == 0);

    CHECK(solve_biquadratic(p, 0.25).empty());
    const auto r = amplitude_roots(p, 0.25);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(-3.5).epsilon(1e-13));

    const ModelParams kerr(1, 1, -0.05, -0.05);
    const auto two = solve_biquadratic(kerr, 37.0 / 42.0);
    REQUIRE(two.size() == 2);
    CHECK(two[0].A2 < two[1].A2);
    CHECK(two[1].A2 == doctest::Approx(26.43).epsilon(1e-3));
    CHECK(two[0].A2 == doctest::Approx(0.476).epsilon(2e-3));
    CHECK(two[1].branch == 1);

    // a4 = a2 = 0: gamma1 = 0 and 1 + 64 k gamma2 / 5 = 0.
    const ModelParams deg(1, 1, 0, -5.0 / 32.0);
    CHECK_THROWS_AS(amplitude_roots(deg, 0.5), Error);
}

TEST_CASE("property: gamma1 = 0 reduces to the single-root formula")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const double delta = u(rng) + (i % 2 ? 2.5 : -2.5);
        const ModelParams p(delta, u(rng), 0.0, 0.5 * u(rng));
        const double k = std::abs(u(rng)) + 0.05;
        const double single = single_root_gamma1_zero(p, k);
        const auto sols = solve_biquadratic(p, k);
        if (single > 0) {
            REQUIRE(sols.size() == 1);
            CHECK(rel(sols[0].A2, single) < 1e-14);
            ++checked;
        } else {
            CHECK(sols.empty());
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("property: semi-Lagrangian A-variation vanishes at B = 2k - g1 A^2")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p(u(rng) + 1.5, u(rng), 0.2 * u(rng), 0.2 * u(rng));
        const double k = std::abs(u(rng)) + 0.1;
        const double A = 2.0 * u(rng) + (u(rng) > 0 ? 2.5 : -2.5);
        auto reduced = [&](double a, double b) {
            const SolitonAnsatz s{a, b, k};
            return effective_lagrangian(p, s) - effective_lagrangian_frozen_term(p, s);
        };
        // Root in B of the central-difference dL/dA.
        const double h = 1e-4 * std::abs(A);
        auto dLdA = [&](double b) { return (reduced(A + h, b) - reduced(A - h, b)) / (2 * h); };
        const double B0 = eliminate_B(p, A, k);
        const double span = 1.0 + std::abs(B0);
        const double root = numerics::find_root_bracketed(dLdA, B0 - span, B0 + span, 1e-14);
        CHECK(std::abs(root - B0) < 1e-6 * std::max(1.0, std::abs(B0)));
    }
}

TEST_CASE("property: B-variation vanishes at every VA solution")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int found = 0;
    for (int i = 0; i < 300; ++i) {
        const ModelParams p(u(rng) + 1.5, u(rng), 0.2 * u(rng), 0.3 * u(rng));
        const double k = std::abs(u(rng)) + 0.1;
        for (const auto& s : solve_biquadratic(p, k)) {
            const double h = 1e-5 * std::max(1.0, std::abs(s.ansatz.B));
            SolitonAnsatz lo = s.ansatz;
            SolitonAnsatz hi = s.ansatz;
            lo.B -= h;
            hi.B += h;
            const double d = (effective_lagrangian(p, hi) - effective_lagrangian(p, lo)) / (2 * h);
            const double scale = (4 * k * s.A2 + s.A2 * std::abs(s.ansatz.B) + 1.0) / std::sqrt(2 * k);
            CHECK(std::abs(d) < 1e-8 * scale);
            CHECK(s.ansatz.B == doctest::Approx(2 * k - p.gamma1() * s.A2).epsilon(1e-15));
            ++found;
        }
    }
    CHECK(found > 30);
}

TEST_CASE("exact ES wavenumber and amplitudes")
{
    CHECK(exact_es_wavenumber(ModelParams(1, 1, 0, -0.25)) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
    CHECK(exact_es_wavenumber(ModelParams(1, 1, -0.05, -0.05)) == doctest::Approx(37.0 / 42.0).epsilon(1e-15));
    CHECK(exact_es_wavenumber(ModelParams(1, 1, 0, -1e9)) == doctest::Approx(1.0 / 6.0).epsilon(1e-8));
    CHECK_THROWS_AS(exact_es_wavenumber(ModelParams(-0.5, 1, 0, -0.25)), Error);
    CHECK_THROWS_AS(exact_es_wavenumber(ModelParams(1, -2, 0, -0.25)), Error);

    const ExactAmplitudes e = exact_amplitudes(ModelParams(1, 1, 0, -0.25), 5.0 / 12.0);
    CHECK(e.A2 == doctest::Approx(2.5));
    CHECK(e.B == doctest::Approx(5.0 / 6.0));
    const ExactAmplitudes f = exact_amplitudes(ModelParams(1, 1, -0.05, -0.05), 37.0 / 42.0);
    CHECK(f.A2 == doctest::Approx(26.4286).epsilon(1e-5));
    CHECK(f.B == doctest::Approx(3.0833).epsilon(1e-4));
    try {
        (void)exact_amplitudes(ModelParams(1, 1, 0, 0.25), 0.5);
        FAIL("expected unphysical");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NoSolution);
        CHECK(std::string(err.what()).find("unphysical") != std::string::npos);
    }
}

TEST_CASE("property: exact chain agrees with the biquadratic and zeroes the residuals")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 40; ++i) {
        const double delta = 0.2 + 2 * u(rng);
        const ModelParams p(delta, 2 * u(rng) - 0.5, -0.3 * u(rng), -0.05 - 0.5 * u(rng));
        double k = 0.0;
        try {
            k = exact_es_wavenumber(p);
        } catch (const Error&) {
            continue;
        }
        const ExactAmplitudes e = exact_amplitudes(p, k);
        bool match = false;
        for (const auto& s : solve_biquadratic(p, k)) {
            match = match || rel(s.A2, e.A2) < 1e-10;
        }
        CHECK(match);
        const SolitonAnsatz a{std::sqrt(e.A2), e.B, k};
        double worst = 0.0;
        for (int j = 0; j <= 400; ++j) {
            const double t = -12.0 + 0.06 * j;
            worst = std::max(worst, std::abs(residual_U(p, a.state(t), a.Upp(t))));
            worst = std::max(worst, std::abs(residual_V(p, a.state(t), a.Vpp(t))));
        }
        CHECK(worst < 1e-9 * std::max(1.0, e.A2));
        ++checked;
    }
    CHECK(checked >= 20);
}
