#include "eshg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace eshg::numerics {

void ToleranceSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        fail(ErrorCode::InvalidArgument, "tolerances must be positive");
    }
    if (max_iter < 1) {
        fail(ErrorCode::InvalidArgument, "max_iter must be at least 1");
    }
}

namespace {

// Kronrod 15-point abscissae/weights and the embedded 7-point Gauss weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const ScalarFn& g, double lo, double hi)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = g(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = g(center - dx);
        const double f2 = g(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    const double err = std::abs(kronrod - gauss);
    return {lo, hi, kronrod, std::isfinite(err) ? err : std::numeric_limits<double>::infinity()};
}

// Pulls infinite bounds onto a finite interval via x = offset +/- atanh(u).
struct Mapped {
    ScalarFn g;
    double lo, hi;
};

Mapped map_interval(const ScalarFn& f, double lo, double hi)
{
    const bool lo_inf = std::isinf(lo);
    const bool hi_inf = std::isinf(hi);
    if (!lo_inf && !hi_inf) {
        return {f, lo, hi};
    }
    // A node that rounds onto u = +-1 sits at infinity, where the integrand has decayed.
    auto term = [](const ScalarFn& fn, double x, double u) {
        const double d = (1.0 - u) * (1.0 + u);
        return d > 0.0 && std::isfinite(x) ? fn(x) / d : 0.0;
    };
    if (lo_inf && hi_inf) {
        return {[f, term](double u) { return term(f, std::atanh(u), u); }, -1.0, 1.0};
    }
    if (hi_inf) {
        return {[f, term, lo](double u) { return term(f, lo + std::atanh(u), u); }, 0.0, 1.0};
    }
    return {[f, term, hi](double u) { return term(f, hi - std::atanh(u), u); }, 0.0, 1.0};
}

} // namespace

QuadResult quad_adaptive_detailed(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol)
{
    tol.validate();
    if (std::isnan(lo) || std::isnan(hi)) {
        fail(ErrorCode::InvalidArgument, "quad_adaptive: NaN bound");
    }
    if (lo == hi) {
        return {};
    }
    if (lo > hi) {
        QuadResult r = quad_adaptive_detailed(f, hi, lo, tol);
        r.value = -r.value;
        return r;
    }

    const Mapped m = map_interval(f, lo, hi);
    std::priority_queue<Segment> heap;
    double value = 0.0;
    double error = 0.0;
    // Seed with a few panels so symmetric oscillatory integrands are not fooled by one estimate.
    constexpr int kSeed = 8;
    for (int i = 0; i < kSeed; ++i) {
        const double a = m.lo + (m.hi - m.lo) * i / kSeed;
        const double b = m.lo + (m.hi - m.lo) * (i + 1) / kSeed;
        Segment s = gauss_kronrod(m.g, a, b);
        value += s.value;
        error += s.error;
        heap.push(s);
    }

    int intervals = kSeed;
    while (error > std::max(tol.abs_tol, tol.rel_tol * std::abs(value))) {
        if (intervals >= tol.max_iter) {
            fail(ErrorCode::NoConvergence, "quad_adaptive: subdivision limit reached (error estimate " +
                                               std::to_string(error) + ")");
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval can no longer be split in double precision; accept what we have.
            break;
        }
        const Segment left = gauss_kronrod(m.g, worst.lo, mid);
        const Segment right = gauss_kronrod(m.g, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Re-sum to shed accumulated update round-off.
    double total = 0.0;
    double total_err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        heap.pop();
    }
    if (!std::isfinite(total)) {
        fail(ErrorCode::NoConvergence, "quad_adaptive: non-finite integrand");
    }
    return {total, total_err, intervals};
}

double quad_adaptive(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol)
{
    return quad_adaptive_detailed(f, lo, hi, tol).value;
}

double find_root_bracketed(const ScalarFn& f, double lo, double hi, double xtol, int max_iter)
{
    return find_root_bracketed(f, lo, hi, f(lo), f(hi), xtol, max_iter);
}

double find_root_bracketed(const ScalarFn& f, double lo, double hi, double f_lo, double f_hi, double xtol,
                           int max_iter)
{
    if (!(xtol > 0.0)) {
        fail(ErrorCode::InvalidArgument, "find_root_bracketed: xtol must be positive");
    }
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
        fail(ErrorCode::InvalidArgument, "invalid bracket: endpoint values do not change sign");
    }

    // Brent-Dekker: a is the previous iterate, b the best estimate, c the contrapoint.
    double a = lo, b = hi, c = lo;
    double fa = f_lo, fb = f_hi, fc = f_lo;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) {
            return b;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, qq;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                qq = -qq;
            }
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * qq - std::abs(tol1 * qq), std::abs(e * qq))) {
                e = d;
                d = p / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (std::isnan(fb)) {
            fail(ErrorCode::NoConvergence, "find_root_bracketed: NaN function value");
        }
    }
    fail(ErrorCode::NoConvergence, "find_root_bracketed: iteration limit reached");
}

Minimum minimize_scalar(const ScalarFn& f, double lo, double hi, double xtol, int max_iter)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        fail(ErrorCode::InvalidArgument, "minimize_scalar: bracket must be finite");
    }
    if (lo > hi) {
        std::swap(lo, hi);
    }
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    Minimum best = f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
    for (int iter = 0; iter < max_iter && (b - a) > xtol; ++iter) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
            if (f1 < best.f) {
                best = {x1, f1};
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
            if (f2 < best.f) {
                best = {x2, f2};
            }
        }
    }
    return best;
}

} // namespace eshg::numerics
