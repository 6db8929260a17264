#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eshg/model.hpp"
#include "eshg/profile.hpp"

namespace eshg::bvp {

struct ShootingOptions {
    double tol = 1e-10;             // integrator abs and rel tolerance
    double t_max = 0.0;             // 0 selects 20 / sqrt(2k)
    double match_time = 0.0;        // 0 selects 2 / sqrt(2k)
    double ceiling = 1e6;
    int max_iter = 60;
    double residual_tol = 1e-9;     // max-norm of the matching mismatch accepted as converged
    double decay_threshold = 1e-6;  // u_leak bound relative to max|U|
    double tail_tolerance = 1e-5;   // ES acceptance: b < tail_tolerance * max|V|
    std::size_t samples = 4000;     // output grid intervals on [0, T_max]
    bool seed_search = true;        // ordinary shooting: fall back to a deterministic seed sweep

    void validate() const;
};

struct TailMeasurement {
    double b = 0.0;
    double omega = 0.0;
    double T = 0.0;
    double u_leak = 0.0;
    double phase = 0.0;  // phase of V = b cos(omega t + phase) at t = T
};

/// Forward integration from (U0, 0, V0, 0) on a uniform output grid. Throws BlowUp at the ceiling.
FieldProfile integrate_profile(const ModelParams& p, double k, double U0, double V0, double T_max, double tol,
                               double ceiling = 1e6, std::size_t samples = 2000);

/// Ordinary soliton by matched shooting: the core is integrated from t = 0, the decaying
/// far field from T_max back to an interior matching time, and (U0, V0) plus the two
/// far-field amplitudes are adjusted until all four components agree there.
/// Without a guess the VA prediction is used, else (sqrt(2k|2k(1+2 delta)-q|), 2k).
FieldProfile shoot_ordinary(const ModelParams& p, double k, std::optional<std::pair<double, double>> guess,
                            const ShootingOptions& opt = {});

/// Window average of sqrt(V^2 + (V'/omega)^2) over [T1, T2].
TailMeasurement measure_tail(const FieldProfile& prof, double T1, double T2, double decay_threshold = 1e-6);

/// Default window (0.6 T_max, T_max).
TailMeasurement measure_tail(const FieldProfile& prof, double decay_threshold = 1e-6);

/// Core state used to seed the delocalized family and the ES refinement.
struct CoreSeed {
    double k = 0.0;   // wavenumber the state was solved at; 0 means "use as is"
    double U0 = 0.0;
    double V0 = 0.0;
    double cU = 0.0;  // far-field U amplitude: U(T) = cU exp(-sqrt(2k) T)
    double bc = 0.0;  // V(T)
    double bs = 0.0;  // V'(T) / omega
};

struct FamilyPoint {
    double V0 = 0.0;
    double U0 = 0.0;
    double b = 0.0;
    bool ok = false;
    std::string note;
    CoreSeed state;
};

struct DelocalizedFamily {
    double k = 0.0;
    std::vector<FamilyPoint> points;
    std::optional<FamilyPoint> minimum;  // quadratic-fit refinement of the best grid point
};

/// For each V0 on an n-point grid over [V0_lo, V0_hi], solves for U0 and the far-field
/// amplitudes so that U decays, then measures the SH tail amplitude.
DelocalizedFamily delocalized_family(const ModelParams& p, double k, double V0_lo, double V0_hi, int n,
                                     const ShootingOptions& opt = {}, std::optional<CoreSeed> seed = std::nullopt);

struct EsSeed {
    CoreSeed state;
    int homotopy_steps = 0;
    std::string source;
};

/// Tail-free starting state for the ES search: the exact truncated soliton when
/// delta * gamma2 < 0 and its wavenumber is embedded, continued into the full model
/// when the variant is Full. Empty when no such state is available.
std::optional<EsSeed> embedded_seed(const ModelParams& p, const ShootingOptions& opt = {});

/// Embedded soliton search over [k_lo, k_hi]: b_min(k) on an n-point grid, golden-section
/// refinement of each minimum, then a direct solve for the tail-free state.
EsReport scan_embedded(const ModelParams& p, double k_lo, double k_hi, int n_samples,
                       const ShootingOptions& opt = {});

/// (U(0), V(0)).
std::pair<double, double> extract_amplitudes(const FieldProfile& prof);

} // namespace eshg::bvp
