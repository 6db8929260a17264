#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "eshg/eshg.h"

TEST_CASE("version and parameter handles")
{
    CHECK(std::string(eshg_version()).size() > 0);
    eshg_params* p = nullptr;
    CHECK(eshg_params_create(0.0, 1, 0, -0.25, ESHG_TRUNCATED, &p) == ESHG_INVALID_ARGUMENT);
    CHECK(p == nullptr);
    CHECK(std::string(eshg_last_error()).find("delta") != std::string::npos);
    REQUIRE(eshg_params_create(1, 1, 0, -0.25, ESHG_TRUNCATED, &p) == ESHG_OK);
    CHECK(std::string(eshg_last_error()).empty());

    eshg_region r;
    CHECK(eshg_classify(p, 0.25, &r) == ESHG_OK);
    CHECK(r == ESHG_ORDINARY);
    double w = 0;
    CHECK(eshg_tail_wavenumber(p, 1.0, &w) == ESHG_OK);
    CHECK(w == doctest::Approx(std::sqrt(2.0)));
    CHECK(eshg_tail_wavenumber(p, 0.25, &w) == ESHG_WRONG_REGION);
    CHECK(eshg_classify(nullptr, 0.25, &r) == ESHG_INVALID_ARGUMENT);

    double ru = 1, rv = 1;
    const double zero[4] = {0, 0, 0, 0};
    CHECK(eshg_residuals(p, 0.3, zero, 0, 0, &ru, &rv) == ESHG_OK);
    CHECK(ru == 0.0);
    CHECK(rv == 0.0);
    eshg_params_destroy(p);
}

TEST_CASE("VA and exact chain through the C API")
{
    eshg_params* p = nullptr;
    REQUIRE(eshg_params_create(1, 1, 0, -0.25, ESHG_TRUNCATED, &p) == ESHG_OK);
    eshg_va_solution sol[2];
    size_t n = 0;
    CHECK(eshg_va_solve(p, 5.0 / 12.0, sol, 2, &n) == ESHG_OK);
    REQUIRE(n == 1);
    CHECK(sol[0].A2 == doctest::Approx(2.5));
    CHECK(eshg_va_solve(p, 0.25, sol, 2, &n) == ESHG_OK);
    CHECK(n == 0);
    CHECK(eshg_va_solve(p, 0.0, sol, 2, &n) == ESHG_INVALID_ARGUMENT);
    double k = 0, A2 = 0, B = 0;
    CHECK(eshg_exact_es_wavenumber(p, &k) == ESHG_OK);
    CHECK(k == doctest::Approx(5.0 / 12.0));
    CHECK(eshg_exact_amplitudes(p, k, &A2, &B) == ESHG_OK);
    CHECK(B == doctest::Approx(5.0 / 6.0));
    eshg_params_destroy(p);

    REQUIRE(eshg_params_create(1, 1, 0, 0.25, ESHG_TRUNCATED, &p) == ESHG_OK);
    CHECK(eshg_exact_amplitudes(p, 0.5, &A2, &B) == ESHG_NO_SOLUTION);
    eshg_params_destroy(p);
}

TEST_CASE("criteria and integrals through the C API")
{
    eshg_params* p = nullptr;
    REQUIRE(eshg_params_create(1, 1, -0.05, -0.05, ESHG_FULL, &p) == ESHG_OK);
    double roots[4];
    size_t n = 0;
    CHECK(eshg_locate_es_full(p, 3.794, 2.735, 0.55, 1.2, roots, 4, &n) == ESHG_OK);
    REQUIRE(n == 1);
    CHECK(roots[0] == doctest::Approx(0.67366611).epsilon(1e-7));
    CHECK(eshg_locate_es_full(p, 3.794, 2.735, 0.9, 1.2, roots, 4, &n) == ESHG_NO_SOLUTION);
    double f = 0, g = 0;
    CHECK(eshg_criterion_truncated(p, 2.0, 0.8, &f) == ESHG_OK);
    CHECK(eshg_criterion_full(p, 3.0, 2.0, 0.8, &g) == ESHG_OK);
    CHECK(f != g);
    CHECK(eshg_criterion_full(p, 3.0, 2.0, 0.0, &g) == ESHG_INVALID_ARGUMENT);
    double v = 0;
    CHECK(eshg_sech_cos_integral(2, 0.0, &v) == ESHG_OK);
    CHECK(v == doctest::Approx(2.0));
    CHECK(eshg_sech_cos_integral(5, 1.0, &v) == ESHG_INVALID_ARGUMENT);
    eshg_params_destroy(p);
}

TEST_CASE("ordinary shooting and profile accessors")
{
    eshg_params* p = nullptr;
    REQUIRE(eshg_params_create(1, 1, 0, -0.25, ESHG_TRUNCATED, &p) == ESHG_OK);
    eshg_profile* prof = nullptr;
    REQUIRE(eshg_shoot_ordinary(p, 0.25, nullptr, 0, 0, &prof) == ESHG_OK);
    const size_t n = eshg_profile_size(prof);
    CHECK(n > 100);
    const double* t = eshg_profile_column(prof, 0);
    const double* V = eshg_profile_column(prof, 2);
    CHECK(t[0] == 0.0);
    double vmin = V[0];
    for (size_t i = 0; i < n; ++i) {
        vmin = std::min(vmin, V[i]);
    }
    CHECK(vmin < 0.0);
    CHECK(eshg_profile_column(prof, 9) == nullptr);
    double res = 1;
    CHECK(eshg_profile_residual(prof, &res) == ESHG_OK);
    CHECK(res < 1e-7);
    CHECK(eshg_profile_write_csv(prof, "/nonexistent-dir/x.csv") == ESHG_INVALID_ARGUMENT);
    eshg_profile_destroy(prof);

    CHECK(eshg_shoot_ordinary(p, 0.8, nullptr, 0, 0, &prof) == ESHG_WRONG_REGION);
    CHECK(prof == nullptr);
    eshg_params_destroy(p);
}

TEST_CASE("run_command")
{
    eshg_result* r = nullptr;
    REQUIRE(eshg_run_command("locate-es", "delta=1\nq=1\ngamma1=-0.05\ngamma2=-0.05\nmethod=exact\n", &r) == ESHG_OK);
    CHECK(eshg_result_exit_code(r) == 0);
    CHECK(std::strstr(eshg_result_stdout(r), "\"schema\": 1") != nullptr);
    eshg_result_destroy(r);

    REQUIRE(eshg_run_command("va-solve", "delta=1\nq=1\ngamma2=-0.25\nk=0.25\n", &r) == ESHG_OK);
    CHECK(eshg_result_exit_code(r) == 2);
    CHECK(std::strstr(eshg_result_stderr(r), "no physical VA solution") != nullptr);
    eshg_result_destroy(r);

    REQUIRE(eshg_run_command("va-solve", "not a config", &r) == ESHG_OK);
    CHECK(eshg_result_exit_code(r) == 1);
    eshg_result_destroy(r);
    CHECK(eshg_run_command(nullptr, "", &r) == ESHG_INVALID_ARGUMENT);
}
