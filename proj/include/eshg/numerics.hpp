#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "eshg/error.hpp"

namespace eshg::numerics {

struct ToleranceSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_iter = 2000;

    /// Throws InvalidArgument unless both tolerances are positive and max_iter >= 1.
    void validate() const;
};

using ScalarFn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. Either bound may be infinite;
/// infinite ends are mapped through x = atanh(u) so that exponentially decaying
/// integrands become bounded on a finite u-interval. The map needs integrands that
/// decay at least like exp(-2|x|); rescale x first for slower ones.
QuadResult quad_adaptive_detailed(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol);
double quad_adaptive(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol);

/// Bracketed root: bisection safeguarding secant / inverse-quadratic steps.
/// The result always lies in [min(lo,hi), max(lo,hi)].
double find_root_bracketed(const ScalarFn& f, double lo, double hi, double xtol, int max_iter = 300);

/// Same, with endpoint values already known (saves two evaluations in scans).
double find_root_bracketed(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi, double xtol,
                           int max_iter = 300);

struct Minimum {
    double x = 0.0;
    double f = 0.0;
};

/// Golden-section search on [lo, hi] until the bracket is narrower than xtol.
/// Returns the best sample seen, so flat or non-unimodal inputs still get an answer.
Minimum minimize_scalar(const ScalarFn& f, double lo, double hi, double xtol, int max_iter = 500);

// ---------------------------------------------------------------------------
// Adaptive ODE stepper (Dormand-Prince 5(4), FSAL) with cubic Hermite dense output.

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using OdeRhs = std::function<Vec<N>(double, const Vec<N>&)>;

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_initial = 0.0;  // 0 selects a step from the initial derivative scale
    double h_min = 1e-14;
    double fixed_step = 0.0; // > 0 disables adaptivity (used for order checks)
    double ceiling = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    double grid_step = 0.0;  // > 0: steps also land exactly on t0 + i * grid_step
    bool state_norm_scale = false;  // scale every component by max_j |y_j| instead of its own size
};

enum class OdeStop { Completed, Ceiling };

template <std::size_t N>
class Trajectory {
public:
    std::vector<double> ts;
    std::vector<Vec<N>> ys;
    std::vector<Vec<N>> dys;
    std::vector<std::size_t> grid;  // indices into ts of the grid nodes (grid_step > 0 only)
    OdeStop stop = OdeStop::Completed;

    [[nodiscard]] double t_begin() const { return ts.front(); }
    [[nodiscard]] double t_end() const { return ts.back(); }
    [[nodiscard]] const Vec<N>& back() const { return ys.back(); }

    /// Cubic Hermite interpolation between accepted steps.
    [[nodiscard]] Vec<N> sample(double t) const;
};

template <std::size_t N>
Trajectory<N> ode_adaptive(const OdeRhs<N>& rhs, const Vec<N>& y0, double t0, double t1, const OdeOptions& opt);

// ---------------------------------------------------------------------------

template <std::size_t N>
Vec<N> Trajectory<N>::sample(double t) const
{
    if (ts.empty()) {
        fail(ErrorCode::InvalidArgument, "sample on empty trajectory");
    }
    if (t <= ts.front()) {
        return ys.front();
    }
    if (t >= ts.back()) {
        return ys.back();
    }
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
    const double h = ts[i + 1] - ts[i];
    const double s = (t - ts[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    Vec<N> out{};
    for (std::size_t j = 0; j < N; ++j) {
        out[j] = h00 * ys[i][j] + h10 * h * dys[i][j] + h01 * ys[i + 1][j] + h11 * h * dys[i + 1][j];
    }
    return out;
}

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms)
{
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < N; ++j) {
            out[j] += h * c * (*k)[j];
        }
    }
    return out;
}

template <std::size_t N>
double max_abs(const Vec<N>& y)
{
    double m = 0.0;
    for (double v : y) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace detail

template <std::size_t N>
Trajectory<N> ode_adaptive(const OdeRhs<N>& rhs, const Vec<N>& y0, double t0, double t1, const OdeOptions& opt)
{
    if (!(t1 > t0)) {
        fail(ErrorCode::InvalidArgument, "ode_adaptive: empty integration span");
    }
    if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0)) {
        fail(ErrorCode::InvalidArgument, "ode_adaptive: tolerances must be positive");
    }

    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory<N> traj;
    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1 = rhs(t, y);
    traj.ts.push_back(t);
    traj.ys.push_back(y);
    traj.dys.push_back(k1);
    const bool gridded = opt.grid_step > 0.0;
    std::size_t next_node = 1;
    if (gridded) {
        traj.grid.push_back(0);
    }

    const bool fixed = opt.fixed_step > 0.0;
    double h = fixed ? opt.fixed_step : opt.h_initial;
    if (!fixed && h <= 0.0) {
        const double scale = opt.abs_tol + opt.rel_tol * detail::max_abs(y);
        const double d = detail::max_abs(k1);
        h = d > 0.0 ? 0.01 * std::pow(scale, 0.2) / std::pow(d, 0.2) : 1e-3;
        h = std::clamp(h, 1e-6, 0.1 * (t1 - t0));
    }

    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) {
            fail(ErrorCode::NoConvergence, "ode_adaptive: step budget exhausted");
        }
        const bool last = t + h >= t1;
        if (last) {
            h = t1 - t;
        }
        const double h_free = h;
        double t_node = std::numeric_limits<double>::infinity();
        if (gridded) {
            t_node = t0 + static_cast<double>(next_node) * opt.grid_step;
            if (t_node > t1 - 1e-9 * opt.grid_step) {
                t_node = t1;
            }
        }
        const bool on_node = gridded && t + h >= t_node;
        if (on_node) {
            h = t_node - t;
        }
        const Vec<N> k2 = rhs(t + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
        const Vec<N> k3 = rhs(t + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = rhs(t + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = rhs(t + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 =
            rhs(t + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y_new = detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec<N> k7 = rhs(t + h, y_new);

        double err = 0.0;
        if (!fixed) {
            const double ynorm = std::max(detail::max_abs(y), detail::max_abs(y_new));
            for (std::size_t j = 0; j < N; ++j) {
                const double ej =
                    h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
                const double size = opt.state_norm_scale ? ynorm : std::max(std::abs(y[j]), std::abs(y_new[j]));
                const double sc = opt.abs_tol + opt.rel_tol * size;
                err += (ej / sc) * (ej / sc);
            }
            err = std::sqrt(err / static_cast<double>(N));
            if (!std::isfinite(err)) {
                err = 1e10;
            }
        }

        if (fixed || err <= 1.0) {
            t = on_node ? t_node : (last ? t1 : t + h);
            y = y_new;
            k1 = k7;
            traj.ts.push_back(t);
            traj.ys.push_back(y);
            traj.dys.push_back(k1);
            if (on_node) {
                traj.grid.push_back(traj.ts.size() - 1);
                ++next_node;
            }
            if (detail::max_abs(y) > opt.ceiling || !std::isfinite(detail::max_abs(y))) {
                traj.stop = OdeStop::Ceiling;
                return traj;
            }
            if (!fixed) {
                const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h *= std::clamp(fac, 0.2, 5.0);
                if (on_node) {
                    h = std::max(h, h_free);  // a step clipped to a node says nothing about the right size
                }
            }
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < opt.h_min) {
                fail(ErrorCode::NoConvergence, "ode_adaptive: step underflow");
            }
        }
    }
    return traj;
}

} // namespace eshg::numerics
