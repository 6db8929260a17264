#include "eshg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "eshg/error.hpp"
#include "eshg/report.hpp"
#include "eshg/tail_criterion.hpp"
#include "eshg/variational.hpp"

namespace eshg::cli {

using nlohmann::json;

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, std::string_view raw)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        fail(ErrorCode::InvalidArgument, "invalid number for '" + key + "': '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

double positive(const RunConfig& cfg, const std::string& key, double fallback)
{
    const double v = cfg.number(key, fallback);
    if (!(v > 0.0)) {
        fail(ErrorCode::InvalidArgument, "'" + key + "' must be positive");
    }
    return v;
}

json region_entry(const ModelParams& p, double k)
{
    const RegionClass r = classify_region(p, k);
    return {{"k", k}, {"region", std::string(to_string(r))}, {"label", io::region_label(r)}};
}

json provenance(const RunConfig& cfg)
{
    const bvp::ShootingOptions opt = cfg.shooting_options();
    return {{"tool", io::kToolName},
            {"version", io::kToolVersion},
            {"tolerances",
             {{"integrator", opt.tol},
              {"matching_residual", opt.residual_tol},
              {"tail_acceptance", opt.tail_tolerance},
              {"decay_threshold", opt.decay_threshold},
              {"root_xtol", 1e-12}}}};
}

io::Report make_report(std::string_view command, const RunConfig& cfg)
{
    io::Report r;
    r.command = std::string(command);
    r.inputs = cfg.echo();
    r.provenance = provenance(cfg);
    r.timestamp = io::utc_timestamp();
    return r;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        fail(ErrorCode::InvalidArgument, "cannot open output file '" + path + "'");
    }
    os << text;
    if (!os) {
        fail(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
    }
}

void write_csv_file(const std::string& path, const FieldProfile& prof, const std::optional<va::SolitonAnsatz>& overlay)
{
    std::ostringstream os;
    io::write_profile_csv(os, prof, overlay);
    write_text_file(path, os.str());
}

std::string roots_text(const std::vector<double>& roots)
{
    std::string s;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", roots[i]);
        s += (i ? ", " : "") + std::string(buf);
    }
    return s;
}

tail::KBracket bracket_from(const RunConfig& cfg, const ModelParams& p, const std::string& key)
{
    if (!cfg.has(key)) {
        return tail::default_bracket(p);
    }
    const std::vector<double> v = cfg.numbers(key);
    if (v.size() != 2 || !(v[0] < v[1])) {
        fail(ErrorCode::InvalidArgument, "'" + key + "' needs two increasing values 'lo,hi'");
    }
    return {v[0], v[1]};
}

std::pair<double, double> scan_range(const RunConfig& cfg, const ModelParams& p)
{
    const tail::KBracket d = tail::default_bracket(p);
    const double lo = cfg.number("kmin", d.lo);
    const double hi = cfg.number("kmax", d.hi);
    require_positive_wavenumber(lo);
    if (!(hi > lo)) {
        fail(ErrorCode::InvalidArgument, "'kmax' must exceed 'kmin'");
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------

json va_solve(const RunConfig& cfg, std::string& message)
{
    const ModelParams p = cfg.params();
    if (p.is_full()) {
        fail(ErrorCode::InvalidArgument, "va-solve applies to the truncated model (--model truncated)");
    }
    const double k = cfg.number("k");
    require_positive_wavenumber(k);

    const std::vector<double> roots = va::amplitude_roots(p, k);
    const std::vector<va::VaSolution> sols = va::solve_biquadratic(p, k);
    json j = json::object();
    j["k"] = k;
    j["region"] = region_entry(p, k)["region"];
    j["label"] = region_entry(p, k)["label"];
    j["roots_A2"] = roots;
    json arr = json::array();
    for (const auto& s : sols) {
        arr.push_back({{"branch", s.branch},
                       {"A2", s.A2},
                       {"A", s.ansatz.A},
                       {"B", s.ansatz.B},
                       {"k", s.ansatz.k},
                       {"leff", s.leff},
                       {"region", std::string(to_string(classify_region(p, k)))}});
    }
    j["solutions"] = arr;
    if (p.gamma1() == 0.0) {
        j["single_root_A2"] = va::single_root_gamma1_zero(p, k);
    }
    if (sols.empty()) {
        message = "no physical VA solution (A\xc2\xb2 = " + roots_text(roots) + ")";
        fail(ErrorCode::NoSolution, message);
    }
    if (cfg.has("output")) {
        const double T = positive(cfg, "tmax", 20.0 / fh_decay_rate(k));
        const auto n = static_cast<std::size_t>(cfg.integer("samples", 2000));
        write_csv_file(cfg.text("output", ""), sample_ansatz(p, sols.front().ansatz, T, n), std::nullopt);
        j["profile_csv"] = cfg.text("output", "");
    }
    return j;
}

json locate_es(const RunConfig& cfg)
{
    const ModelParams p = cfg.params();
    const std::string method = cfg.text("method", "exact");
    if (method == "exact") {
        if (p.is_full()) {
            fail(ErrorCode::InvalidArgument, "the exact method applies to the truncated model");
        }
        const EsReport rep = tail::locate_es_truncated(p);
        json j = io::es_report_json(rep, p);
        const va::ExactAmplitudes amp = va::exact_amplitudes(p, rep.k_es);
        j["amplitudes"] = {{"A2", amp.A2}, {"B", amp.B}};
        return j;
    }
    if (method == "scan") {
        const auto [lo, hi] = scan_range(cfg, p);
        const int n = static_cast<int>(cfg.integer("samples", 36));
        const EsReport rep = bvp::scan_embedded(p, lo, hi, n, cfg.shooting_options());
        json j = io::es_report_json(rep, p);
        if (cfg.has("output") && !rep.profile.empty()) {
            write_csv_file(cfg.text("output", ""), rep.profile.front(), std::nullopt);
            j["profile_csv"] = cfg.text("output", "");
        }
        return j;
    }
    if (method != "criterion") {
        fail(ErrorCode::InvalidArgument, "unknown method '" + method + "' (exact|criterion|scan)");
    }

    const tail::KBracket br = bracket_from(cfg, p, "bracket");
    const double k_ref = cfg.number("reference-k", 0.688);
    json j = json::object();
    if (!p.is_full()) {
        const tail::CriterionResult cr = tail::locate_es_va_chain(p, br);
        json roots = json::array();
        for (double k : cr.k_candidates) {
            roots.push_back(region_entry(p, k));
        }
        j["method"] = std::string(to_string(cr.method));
        j["bracket"] = {br.lo, br.hi};
        j["criterion_roots"] = roots;
        const double k_exact = va::exact_es_wavenumber(p);
        j["exact"] = region_entry(p, k_exact);
        const double k0 = *std::min_element(cr.k_candidates.begin(), cr.k_candidates.end(), [&](double a, double b) {
            return std::abs(a - k_exact) < std::abs(b - k_exact);
        });
        j["k_es"] = k0;
        j["rel_err_vs_exact"] = std::abs(k0 - k_exact) / k_exact;
        return j;
    }

    // Full model: amplitudes from a computed profile unless given explicitly; the
    // scan result is the reference the criterion root is judged against.
    std::optional<double> k_scan;
    double A = 0.0;
    double B = 0.0;
    std::string source;
    if (cfg.has("amplitudes")) {
        const std::vector<double> ab = cfg.numbers("amplitudes");
        if (ab.size() != 2) {
            fail(ErrorCode::InvalidArgument, "'amplitudes' needs 'A,B'");
        }
        A = ab[0];
        B = ab[1];
        source = "given";
    }
    if (!cfg.has("amplitudes") || cfg.has("kmin") || cfg.has("kmax")) {
        const auto [lo, hi] = scan_range(cfg, p);
        const EsReport rep =
            bvp::scan_embedded(p, lo, hi, static_cast<int>(cfg.integer("samples", 36)), cfg.shooting_options());
        k_scan = rep.k_es;
        j["scan"] = io::es_report_json(rep, p);
        if (!cfg.has("amplitudes")) {
            const auto [a, b] = bvp::extract_amplitudes(rep.profile.front());
            A = a;
            B = b;
            source = "numerical profile";
        }
    }
    const tail::CriterionResult cr = tail::locate_es_full(p, A, B, br);
    json roots = json::array();
    for (double k : cr.k_candidates) {
        roots.push_back(region_entry(p, k));
    }
    const double target = k_scan.value_or(k_ref);
    const double k0 = *std::min_element(cr.k_candidates.begin(), cr.k_candidates.end(),
                                        [&](double a, double b) { return std::abs(a - target) < std::abs(b - target); });
    j["method"] = std::string(to_string(cr.method));
    j["amplitudes"] = {{"A", A}, {"B", B}, {"source", source}};
    j["bracket"] = {br.lo, br.hi};
    j["criterion_roots"] = roots;
    j["k_es"] = k0;
    j["region"] = region_entry(p, k0)["region"];
    j["label"] = region_entry(p, k0)["label"];
    j["reference_k"] = k_ref;
    j["rel_err_vs_reference"] = std::abs(k0 - k_ref) / k_ref;
    if (k_scan) {
        j["k_scan"] = *k_scan;
        j["rel_err_vs_scan"] = std::abs(k0 - *k_scan) / *k_scan;
        j["reference_rel_err_vs_scan"] = std::abs(k_ref - *k_scan) / *k_scan;
    } else {
        j["k_scan"] = nullptr;
    }
    return j;
}

json shoot(const RunConfig& cfg)
{
    const ModelParams p = cfg.params();
    const std::string type = cfg.text("type", "ordinary");
    const bvp::ShootingOptions opt = cfg.shooting_options();
    json j = json::object();
    if (type == "embedded") {
        const auto [lo, hi] = scan_range(cfg, p);
        const EsReport rep = bvp::scan_embedded(p, lo, hi, static_cast<int>(cfg.integer("samples", 36)), opt);
        j = io::es_report_json(rep, p);
        if (cfg.has("output")) {
            write_csv_file(cfg.text("output", ""), rep.profile.front(), std::nullopt);
            j["profile_csv"] = cfg.text("output", "");
        }
        return j;
    }
    if (type != "ordinary") {
        fail(ErrorCode::InvalidArgument, "unknown shoot type '" + type + "' (ordinary|embedded)");
    }
    const double k = cfg.number("k");
    require_positive_wavenumber(k);
    std::optional<std::pair<double, double>> guess;
    if (cfg.has("guess")) {
        const std::vector<double> g = cfg.numbers("guess");
        if (g.size() != 2) {
            fail(ErrorCode::InvalidArgument, "'guess' needs 'U0,V0'");
        }
        guess = std::pair{g[0], g[1]};
    }
    const FieldProfile prof = bvp::shoot_ordinary(p, k, guess, opt);

    double vmin = prof.Vs.front();
    double t_vmin = prof.ts.front();
    int changes = 0;
    for (std::size_t i = 1; i < prof.size(); ++i) {
        if (prof.Vs[i] < vmin) {
            vmin = prof.Vs[i];
            t_vmin = prof.ts[i];
        }
        if ((prof.Vs[i] < 0.0) != (prof.Vs[i - 1] < 0.0) && prof.Vs[i] != 0.0) {
            ++changes;
        }
    }

    // Overlay with the truncated-model VA, nearest branch to the computed core amplitude.
    std::optional<va::SolitonAnsatz> overlay;
    json ov = json::object();
    const ModelParams pt = p.with_variant(Variant::Truncated);
    const std::vector<va::VaSolution> sols = va::solve_biquadratic(pt, k);
    if (!sols.empty()) {
        const auto best = std::min_element(sols.begin(), sols.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.ansatz.A - prof.Us.front()) < std::abs(b.ansatz.A - prof.Us.front());
        });
        overlay = best->ansatz;
        ov = {{"present", true}, {"A", best->ansatz.A}, {"B", best->ansatz.B}, {"branch", best->branch}};
    } else {
        const std::vector<double> roots = va::amplitude_roots(pt, k);
        ov = {{"present", false},
              {"roots_A2", roots},
              {"reason", "no physical VA solution (A\xc2\xb2 = " + roots_text(roots) + ")"}};
    }

    j["type"] = "ordinary";
    j["k"] = k;
    j["region"] = region_entry(p, k)["region"];
    j["label"] = region_entry(p, k)["label"];
    j["U0"] = prof.Us.front();
    j["V0"] = prof.Vs.front();
    j["T_max"] = prof.t_max();
    j["samples"] = prof.size();
    j["residual_max"] = profile_residual(prof);
    j["V_min"] = vmin;
    j["t_at_V_min"] = t_vmin;
    j["V_sign_changes"] = changes;
    j["va_overlay"] = ov;
    if (cfg.has("output")) {
        write_csv_file(cfg.text("output", ""), prof, overlay);
        j["profile_csv"] = cfg.text("output", "");
    }
    return j;
}

struct Axis {
    std::string name;
    std::vector<double> values;
};

std::vector<Axis> parse_grid(const std::string& spec)
{
    static const std::vector<std::string> allowed{"delta", "q", "gamma1", "gamma2"};
    std::vector<Axis> axes;
    if (trim(spec).empty()) {
        return axes;
    }
    for (const std::string& part : split(spec, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidArgument, "grid axis '" + part + "' is not name=lo:hi:n");
        }
        Axis a;
        a.name = trim(std::string_view(part).substr(0, eq));
        if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end()) {
            fail(ErrorCode::InvalidArgument, "grid axis '" + a.name + "' is not a model parameter");
        }
        const std::vector<std::string> f = split(std::string_view(part).substr(eq + 1), ':');
        if (f.size() != 3) {
            fail(ErrorCode::InvalidArgument, "grid axis '" + part + "' is not name=lo:hi:n");
        }
        const double lo = parse_double(a.name, f[0]);
        const double hi = parse_double(a.name, f[1]);
        const double nd = parse_double(a.name, f[2]);
        if (nd < 0 || nd != std::floor(nd) || nd > 1e6) {
            fail(ErrorCode::InvalidArgument, "grid axis '" + a.name + "' needs an integer count");
        }
        const auto n = static_cast<std::size_t>(nd);
        for (std::size_t i = 0; i < n; ++i) {
            a.values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        axes.push_back(std::move(a));
    }
    return axes;
}

json sweep(const RunConfig& cfg, int& exit_code)
{
    const std::vector<Axis> axes = parse_grid(cfg.text("grid", ""));
    double total = axes.empty() ? 0.0 : 1.0;
    for (const Axis& a : axes) {
        total *= static_cast<double>(a.values.size());
    }
    if (total < 1.0) {
        fail(ErrorCode::InvalidArgument, "empty grid");
    }
    if (total > 1e6) {
        fail(ErrorCode::InvalidArgument, "grid exceeds 10^6 points");
    }
    const auto n = static_cast<std::size_t>(total);
    const long jobs = cfg.integer("jobs", 1);
    if (jobs < 1) {
        fail(ErrorCode::InvalidArgument, "'jobs' must be at least 1");
    }

    // Point configs are built up front so workers only read shared state.
    std::vector<RunConfig> points(n, cfg);
    std::vector<json> params(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t m = axes[a].values.size();
            points[i].set(axes[a].name, io::format_double(axes[a].values[rem % m]));
            rem /= m;
        }
        params[i] = json::object();
        for (const char* key : {"delta", "q", "gamma1", "gamma2"}) {
            params[i][key] = points[i].has(key) ? json(points[i].number(key)) : json(nullptr);
        }
    }

    std::vector<json> records(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            json rec = {{"index", i}, {"params", params[i]}};
            try {
                rec["status"] = "ok";
                rec["result"] = locate_es(points[i]);
            } catch (const Error& e) {
                rec["status"] = "error";
                rec["error_code"] = static_cast<int>(e.code());
                rec["message"] = e.what();
            } catch (const std::exception& e) {
                rec["status"] = "error";
                rec["error_code"] = static_cast<int>(ErrorCode::Internal);
                rec["message"] = e.what();
            }
            records[i] = std::move(rec);
        }
    };
    const auto threads = static_cast<std::size_t>(std::min<long>(jobs, static_cast<long>(n)));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    std::size_t ok = 0;
    for (const json& r : records) {
        ok += r["status"] == "ok" ? 1 : 0;
    }
    exit_code = ok > 0 ? 0 : 2;
    json grid = json::array();
    for (const Axis& a : axes) {
        grid.push_back({{"name", a.name}, {"values", a.values}});
    }
    return {{"grid", grid}, {"points", n}, {"succeeded", ok}, {"failed", n - ok}, {"records", records}};
}

json integrals_check(const RunConfig& cfg, std::string& table, int& exit_code)
{
    const long count = cfg.integer("samples", 30);
    if (count < 2) {
        fail(ErrorCode::InvalidArgument, "'samples' must be at least 2");
    }
    const double tol = cfg.number("tol", 1e-9);
    const double a_lo = 1e-3;
    const double a_hi = 20.0;
    json rows = json::array();
    double worst = 0.0;
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%2s %12s %24s %24s %10s\n", "n", "a", "closed form", "quadrature", "rel err");
    os << line;
    for (int nn : {2, 4, 6}) {
        for (long i = 0; i < count; ++i) {
            const double a = a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / static_cast<double>(count - 1));
            const double cf = tail::sech_cos_integral(nn, a);
            const double qd = tail::sech_cos_integral_quadrature(nn, a);
            const double rel = std::abs(cf - qd) / std::max(std::abs(qd), std::numeric_limits<double>::min());
            worst = std::max(worst, rel);
            rows.push_back({{"n", nn}, {"a", a}, {"closed_form", cf}, {"quadrature", qd}, {"rel_err", rel}});
            std::snprintf(line, sizeof line, "%2d %12.6g %24.16e %24.16e %10.2e\n", nn, a, cf, qd, rel);
            os << line;
        }
    }
    const bool pass = worst <= tol;
    std::snprintf(line, sizeof line, "max rel err %.3e (tolerance %.1e): %s\n", worst, tol, pass ? "PASS" : "FAIL");
    os << line;
    table = os.str();
    exit_code = pass ? 0 : 2;
    return {{"rows", rows}, {"max_rel_err", worst}, {"tolerance", tol}, {"pass", pass}};
}

} // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "delta", "q",    "gamma1", "gamma2", "model", "k",    "kmin",       "kmax",       "samples",
        "tol",   "tmax", "method", "output", "jobs",  "type", "guess",      "grid",       "amplitudes",
        "bracket", "reference-k"};
    return keys;
}

RunConfig RunConfig::parse(std::string_view text)
{
    RunConfig cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        while (!key.empty() && key.front() == '-') {
            key.erase(key.begin());
        }
        cfg.set(key, trim(std::string_view(body).substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail(ErrorCode::InvalidArgument, "unknown option '" + key + "'");
    }
    values_[key] = value;
}

bool RunConfig::has(const std::string& key) const
{
    return values_.count(key) > 0;
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) {
        fail(ErrorCode::InvalidArgument, "missing required option '" + key + "'");
    }
    return parse_double(key, it->second);
}

double RunConfig::number(const std::string& key, double fallback) const
{
    return has(key) ? number(key) : fallback;
}

long RunConfig::integer(const std::string& key, long fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e15) {
        fail(ErrorCode::InvalidArgument, "'" + key + "' must be an integer");
    }
    return static_cast<long>(v);
}

std::vector<double> RunConfig::numbers(const std::string& key) const
{
    std::vector<double> out;
    for (const std::string& part : split(text(key, ""), ',')) {
        out.push_back(parse_double(key, part));
    }
    return out;
}

ModelParams RunConfig::params() const
{
    const Variant v = variant_from_string(text("model", "truncated"));
    return {number("delta"), number("q"), number("gamma1", 0.0), number("gamma2", 0.0), v};
}

bvp::ShootingOptions RunConfig::shooting_options() const
{
    bvp::ShootingOptions opt;
    opt.tol = positive(*this, "tol", opt.tol);
    opt.t_max = has("tmax") ? positive(*this, "tmax", 1.0) : 0.0;
    opt.validate();
    return opt;
}

json RunConfig::echo() const
{
    json j = json::object();
    for (const auto& [key, value] : values_) {
        j[key] = value;
    }
    return j;
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::WrongRegion:
        return 1;
    default:
        return 2;
    }
}

CommandOutcome run_command(std::string_view command, const RunConfig& cfg)
{
    CommandOutcome out;
    io::Report rep;
    try {
        rep = make_report(command, cfg);
        std::string message;
        std::string table;
        int code = 0;
        if (command == "va-solve") {
            try {
                rep.results = va_solve(cfg, message);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::NoSolution && !message.empty()) {
                    out.exit_code = 2;
                    out.err = "error: " + message + "\n";
                    return out;
                }
                throw;
            }
        } else if (command == "locate-es") {
            rep.results = locate_es(cfg);
        } else if (command == "shoot") {
            rep.results = shoot(cfg);
        } else if (command == "sweep") {
            rep.results = sweep(cfg, code);
        } else if (command == "integrals-check") {
            rep.results = integrals_check(cfg, table, code);
        } else {
            fail(ErrorCode::InvalidArgument, "unknown command '" + std::string(command) + "'");
        }
        out.exit_code = code;
        const std::string doc = io::dump(rep);
        if (command == "integrals-check") {
            out.out = table;
            if (cfg.has("output")) {
                write_text_file(cfg.text("output", ""), doc);
            }
        } else {
            out.out = doc;
            // Commands whose --output is a CSV keep the JSON on stdout only.
            if (command == "sweep" && cfg.has("output")) {
                write_text_file(cfg.text("output", ""), doc);
            }
        }
        if (code == 2 && command == "sweep") {
            out.err = "error: no grid point succeeded\n";
        }
    } catch (const Error& e) {
        out.exit_code = exit_code_for(e.code());
        out.err = std::string("error: ") + e.what() + "\n";
        out.out.clear();
    } catch (const std::exception& e) {
        out.exit_code = 2;
        out.err = std::string("internal error: ") + e.what() + "\n";
        out.out.clear();
    }
    return out;
}

CommandOutcome run_command_text(std::string_view command, std::string_view config_text)
{
    try {
        return run_command(command, RunConfig::parse(config_text));
    } catch (const Error& e) {
        return {exit_code_for(e.code()), "", std::string("error: ") + e.what() + "\n"};
    }
}

} // namespace eshg::cli
