#include "eshg/eshg.h"

#include <fstream>
#include <new>
#include <string>

#include "eshg/commands.hpp"
#include "eshg/error.hpp"
#include "eshg/model.hpp"
#include "eshg/profile.hpp"
#include "eshg/report.hpp"
#include "eshg/shooting.hpp"
#include "eshg/tail_criterion.hpp"
#include "eshg/variational.hpp"

struct eshg_params {
    eshg::ModelParams p;
};

struct eshg_profile {
    eshg::FieldProfile prof;
};

struct eshg_result {
    eshg::cli::CommandOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

eshg_status status_of(eshg::ErrorCode c)
{
    return static_cast<eshg_status>(static_cast<int>(c));
}

template <class F>
eshg_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return ESHG_OK;
    } catch (const eshg::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return ESHG_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ESHG_INTERNAL;
    }
}

void need(const void* ptr, const char* what)
{
    if (ptr == nullptr) {
        eshg::fail(eshg::ErrorCode::InvalidArgument, std::string("null argument: ") + what);
    }
}

eshg_region region_of(eshg::RegionClass r)
{
    switch (r) {
    case eshg::RegionClass::Ordinary:
        return ESHG_ORDINARY;
    case eshg::RegionClass::EmbeddedPermitted:
        return ESHG_EMBEDDED_PERMITTED;
    default:
        return ESHG_NEITHER;
    }
}

} // namespace

extern "C" {

const char* eshg_version(void)
{
    return eshg::io::kToolVersion;
}

const char* eshg_last_error(void)
{
    return g_last_error.c_str();
}

eshg_status eshg_params_create(double delta, double q, double gamma1, double gamma2, eshg_variant variant,
                               eshg_params** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        if (variant != ESHG_FULL && variant != ESHG_TRUNCATED) {
            eshg::fail(eshg::ErrorCode::InvalidArgument, "unknown model variant");
        }
        const auto v = variant == ESHG_FULL ? eshg::Variant::Full : eshg::Variant::Truncated;
        *out = new eshg_params{eshg::ModelParams(delta, q, gamma1, gamma2, v)};
    });
}

void eshg_params_destroy(eshg_params* p)
{
    delete p;
}

eshg_status eshg_classify(const eshg_params* p, double k, eshg_region* out)
{
    return guarded([&] {
        need(p, "params");
        need(out, "out");
        *out = region_of(eshg::classify_region(p->p, k));
    });
}

eshg_status eshg_tail_wavenumber(const eshg_params* p, double k, double* omega)
{
    return guarded([&] {
        need(p, "params");
        need(omega, "omega");
        const auto w = eshg::tail_wavenumber(p->p, k);
        if (!w) {
            eshg::fail(eshg::ErrorCode::WrongRegion, "no oscillatory tail");
        }
        *omega = *w;
    });
}

eshg_status eshg_residuals(const eshg_params* p, double k, const double state[4], double Upp, double Vpp,
                           double* res_U, double* res_V)
{
    return guarded([&] {
        need(p, "params");
        need(state, "state");
        need(res_U, "res_U");
        need(res_V, "res_V");
        const eshg::StationaryState s{k, state[0], state[1], state[2], state[3]};
        *res_U = eshg::residual_U(p->p, s, Upp);
        *res_V = eshg::residual_V(p->p, s, Vpp);
    });
}

eshg_status eshg_va_solve(const eshg_params* p, double k, eshg_va_solution* out, size_t capacity, size_t* count)
{
    return guarded([&] {
        need(p, "params");
        need(count, "count");
        if (capacity > 0) {
            need(out, "out");
        }
        eshg::require_positive_wavenumber(k);
        const auto sols = eshg::va::solve_biquadratic(p->p, k);
        *count = sols.size();
        for (size_t i = 0; i < sols.size() && i < capacity; ++i) {
            out[i] = {sols[i].ansatz.A, sols[i].ansatz.B, sols[i].ansatz.k, sols[i].A2, sols[i].leff, sols[i].branch};
        }
    });
}

eshg_status eshg_exact_es_wavenumber(const eshg_params* p, double* k)
{
    return guarded([&] {
        need(p, "params");
        need(k, "k");
        *k = eshg::va::exact_es_wavenumber(p->p);
    });
}

eshg_status eshg_exact_amplitudes(const eshg_params* p, double k, double* A2, double* B)
{
    return guarded([&] {
        need(p, "params");
        need(A2, "A2");
        need(B, "B");
        const auto a = eshg::va::exact_amplitudes(p->p, k);
        *A2 = a.A2;
        *B = a.B;
    });
}

eshg_status eshg_criterion_truncated(const eshg_params* p, double B, double k, double* f)
{
    return guarded([&] {
        need(p, "params");
        need(f, "f");
        *f = eshg::tail::criterion_truncated(p->p, B, k);
    });
}

eshg_status eshg_criterion_full(const eshg_params* p, double A, double B, double k, double* g)
{
    return guarded([&] {
        need(p, "params");
        need(g, "g");
        *g = eshg::tail::criterion_full(p->p, A, B, k);
    });
}

eshg_status eshg_locate_es_full(const eshg_params* p, double A, double B, double k_lo, double k_hi, double* roots,
                                size_t capacity, size_t* count)
{
    return guarded([&] {
        need(p, "params");
        need(count, "count");
        if (capacity > 0) {
            need(roots, "roots");
        }
        const auto r = eshg::tail::locate_es_full(p->p, A, B, {k_lo, k_hi});
        *count = r.k_candidates.size();
        for (size_t i = 0; i < r.k_candidates.size() && i < capacity; ++i) {
            roots[i] = r.k_candidates[i];
        }
    });
}

eshg_status eshg_sech_cos_integral(int n, double a, double* value)
{
    return guarded([&] {
        need(value, "value");
        *value = eshg::tail::sech_cos_integral(n, a);
    });
}

eshg_status eshg_shoot_ordinary(const eshg_params* p, double k, const double* guess, double tol, double t_max,
                                eshg_profile** out)
{
    return guarded([&] {
        need(p, "params");
        need(out, "out");
        *out = nullptr;
        eshg::bvp::ShootingOptions opt;
        if (tol != 0.0) {
            opt.tol = tol;
        }
        opt.t_max = t_max;
        std::optional<std::pair<double, double>> g;
        if (guess != nullptr) {
            g = std::pair{guess[0], guess[1]};
        }
        *out = new eshg_profile{eshg::bvp::shoot_ordinary(p->p, k, g, opt)};
    });
}

eshg_status eshg_scan_embedded(const eshg_params* p, double k_lo, double k_hi, int samples, eshg_es_summary* summary,
                               eshg_profile** profile)
{
    return guarded([&] {
        need(p, "params");
        need(summary, "summary");
        if (profile != nullptr) {
            *profile = nullptr;
        }
        const eshg::EsReport r = eshg::bvp::scan_embedded(p->p, k_lo, k_hi, samples);
        *summary = {r.k_es, r.b_at_min, r.A, r.B, r.residual_max, region_of(r.region)};
        if (profile != nullptr && !r.profile.empty()) {
            *profile = new eshg_profile{r.profile.front()};
        }
    });
}

size_t eshg_profile_size(const eshg_profile* prof)
{
    return prof == nullptr ? 0 : prof->prof.size();
}

const double* eshg_profile_column(const eshg_profile* prof, int column)
{
    if (prof == nullptr) {
        return nullptr;
    }
    switch (column) {
    case 0:
        return prof->prof.ts.data();
    case 1:
        return prof->prof.Us.data();
    case 2:
        return prof->prof.Vs.data();
    case 3:
        return prof->prof.Ups.data();
    case 4:
        return prof->prof.Vps.data();
    default:
        return nullptr;
    }
}

eshg_status eshg_profile_residual(const eshg_profile* prof, double* residual)
{
    return guarded([&] {
        need(prof, "profile");
        need(residual, "residual");
        *residual = eshg::profile_residual(prof->prof);
    });
}

eshg_status eshg_profile_write_csv(const eshg_profile* prof, const char* path)
{
    return guarded([&] {
        need(prof, "profile");
        need(path, "path");
        std::ofstream os(path, std::ios::binary);
        if (!os) {
            eshg::fail(eshg::ErrorCode::InvalidArgument, std::string("cannot open '") + path + "'");
        }
        eshg::io::write_profile_csv(os, prof->prof);
    });
}

void eshg_profile_destroy(eshg_profile* prof)
{
    delete prof;
}

eshg_status eshg_run_command(const char* command, const char* config_text, eshg_result** out)
{
    return guarded([&] {
        need(command, "command");
        need(out, "out");
        *out = new eshg_result{eshg::cli::run_command_text(command, config_text ? config_text : "")};
    });
}

int eshg_result_exit_code(const eshg_result* r)
{
    return r == nullptr ? 1 : r->outcome.exit_code;
}

const char* eshg_result_stdout(const eshg_result* r)
{
    return r == nullptr ? "" : r->outcome.out.c_str();
}

const char* eshg_result_stderr(const eshg_result* r)
{
    return r == nullptr ? "" : r->outcome.err.c_str();
}

void eshg_result_destroy(eshg_result* r)
{
    delete r;
}

} // extern "C"
