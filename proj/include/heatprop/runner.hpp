#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatprop/estimates.hpp"
#include "heatprop/scenario.hpp"
#include "heatprop/statistics.hpp"
#include "heatprop/veryweak.hpp"

namespace heatprop {

using json = nlohmann::ordered_json;

/// Settings shared by every subcommand.  bound_scale multiplies verifier
/// bounds before the pass/fail decision; it exists so tests can force a
/// violation without constructing a pathological scenario.
struct RunOptions {
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    double bound_scale = 1.0;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string model_kind_name(const DiffusivityModel& m) {
    switch (m.kind()) {
        case DiffusivityModel::Kind::Constant: return "constant";
        case DiffusivityModel::Kind::PiecewiseConstant: return "piecewise_constant";
        case DiffusivityModel::Kind::SmoothParametric: return "smooth_parametric";
        case DiffusivityModel::Kind::Mollified: return "mollified";
    }
    return "unknown";
}

inline json grid_to_json(const SpatialGrid& g) {
    return json{{"dim", g.dim}, {"points", g.n}, {"half_width", g.half_width}};
}

inline void write_json_atomic(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

inline Trajectory solve_scenario(const Scenario& sc, const DiffusivityModel& model,
                                 const Field& u0) {
    if (!sc.source.active()) return solve_homogeneous(u0, model, sc.times);
    SourceFn f = sc.source.build(sc.grid);
    Trajectory traj;
    traj.times = sc.times;
    for (double t : sc.times) {
        if (t == 0.0)
            traj.states.push_back(u0);
        else
            traj.states.push_back(solve_duhamel(u0, f, model, t, sc.panels));
    }
    return traj;
}

inline json report_to_json(const BoundReport& r, const std::string& params) {
    return json{{"check", r.kind},     {"params", params},
                {"t", r.t},            {"measured", r.measured},
                {"bound", r.bound},    {"ratio", r.ratio},
                {"satisfied", r.satisfied}, {"tolerance", r.tolerance}};
}

inline void apply_bound_scale(BoundReport& r, double scale) {
    if (scale == 1.0) return;
    r.bound *= scale;
    r.ratio = std::isinf(r.bound) ? 0.0 : r.measured / r.bound;
    r.satisfied = r.measured <= r.bound * (1.0 + kBoundSlack) || std::isinf(r.bound);
}

inline json fit_to_json(const SlopeFit& f) {
    return json{{"seminorm", f.seminorm},
                {"slope", f.slope},
                {"stderr", f.stderr_},
                {"intercept", f.intercept},
                {"points", f.points}};
}

inline json diagnostics_to_json(const NetDiagnostics& d) {
    json fits = json::array();
    for (const auto& f : d.fits) fits.push_back(fit_to_json(f));
    json j{{"kind", d.kind},
           {"verdict", d.verdict},
           {"seminorms", d.seminorms},
           {"epsilons", d.epsilons},
           {"values", d.values},
           {"fits", fits}};
    if (d.kind == "moderateness") j["order"] = d.moderateness_order;
    return j;
}

}  // namespace detail

/// solve: states as binary fields plus norms.csv and meta.json.
inline int run_solve(const Scenario& sc, const RunOptions& opt) {
    const DiffusivityModel& model = sc.require_model();
    const Field u0 = sc.initial.build(sc.grid);
    Trajectory traj = detail::solve_scenario(sc, model, u0);

    json states = json::array();
    std::string csv = "index,time,mass,l1,l2,linf,flags\n";
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const Field& u = traj.states[i];
        char name[32];
        std::snprintf(name, sizeof(name), "state_%04zu.bin", i);
        write_field(opt.out_dir / name, u);
        csv += std::to_string(i) + "," + detail::fmt_double(traj.times[i]) + "," +
               detail::fmt_double(u.mass()) + "," +
               detail::fmt_double(lq_norm(u, 1.0)) + "," +
               detail::fmt_double(lq_norm(u, 2.0)) + "," +
               detail::fmt_double(u.max_abs()) + "," + std::to_string(u.flags) + "\n";
        states.push_back(json{{"file", name},
                              {"time", traj.times[i]},
                              {"flags", u.flags}});
    }
    detail::write_file_atomic(opt.out_dir / "norms.csv", csv);

    json meta{{"command", "solve"},
              {"grid", detail::grid_to_json(sc.grid)},
              {"model", detail::model_kind_name(model)},
              {"times", sc.times},
              {"panels", sc.panels},
              {"seed", opt.seed.value_or(sc.seed)},
              {"source", sc.source.active()},
              {"states", states},
              {"state_format",
               "24-byte header (u64 dim, u64 points per axis, f64 half-width, all "
               "little-endian) then row-major f64 samples, last axis fastest"}};
    detail::write_json_atomic(opt.out_dir / "meta.json", meta);
    return 0;
}

/// certify: closed-form kernel facts checked against independent numerics,
/// written to certificate.json.  Exit is nonzero when any check fails.
inline int run_certify(const Scenario& sc, const RunOptions& opt) {
    const DiffusivityModel& model = sc.require_model();
    const int n = model.dim();
    json checks = json::array();
    bool all_ok = true;
    auto push = [&](json j, bool ok) {
        j["pass"] = ok;
        checks.push_back(std::move(j));
        all_ok = all_ok && ok;
    };

    std::vector<std::pair<double, double>> spans;
    for (double t : sc.times)
        if (t > 0.0) spans.emplace_back(0.0, t);
    for (size_t i = 1; i < sc.times.size(); ++i)
        if (sc.times[i - 1] < sc.times[i] && sc.times[i - 1] > 0.0)
            spans.emplace_back(sc.times[i - 1], sc.times[i]);
    if (spans.empty()) spans.emplace_back(0.0, 1.0);

    const double mass_tol = 1e-8;
    for (auto [s, t] : spans) {
        KernelParams kp(model.accumulate(s, t));
        const double mass = kernel_mass(kp);
        const double err = std::abs(mass - 1.0);
        push(json{{"check", "mass"},
                  {"s", s},
                  {"t", t},
                  {"value", mass},
                  {"error", err},
                  {"tolerance", mass_tol}},
             err <= mass_tol);
    }

    {
        const double t_ref = spans.back().second;
        KernelParams kp(model.accumulate(0.0, t_ref));
        const double norm_tol = 1e-8;
        for (double p : sc.certify.norm_ps) {
            const double closed = kernel_p_norm(kp, p);
            double numeric;
            if (std::isinf(p)) {
                std::vector<double> origin(n, 0.0);
                numeric = kernel_eval(origin, kp);
            } else {
                numeric = kernel_p_norm_quadrature(kp, p);
            }
            const double rel = std::abs(numeric - closed) / closed;
            push(json{{"check", "p_norm"},
                      {"p", std::isinf(p) ? json("inf") : json(p)},
                      {"t", t_ref},
                      {"closed_form", closed},
                      {"quadrature", numeric},
                      {"rel_error", rel},
                      {"tolerance", norm_tol}},
                 rel <= norm_tol);
        }
    }

    {
        const double t = sc.certify.residual_time;
        const double h = sc.certify.residual_h;
        std::vector<double> x(n, 0.0);
        x[0] = 0.4;
        if (n > 1) x[1] = -0.3;
        const double res = heat_residual(model, x, 0.0, t, h);
        const double res_coarse = heat_residual(model, x, 0.0, t, 1e-2);
        const double res_half = heat_residual(model, x, 0.0, t, 5e-3);
        const double order_ratio = res_coarse / res_half;
        const double res_tol = 1e-6;
        push(json{{"check", "pde_residual"},
                  {"t", t},
                  {"h", h},
                  {"residual", res},
                  {"tolerance", res_tol},
                  {"halving_ratio", order_ratio},
                  {"halving_window", json::array({3.0, 5.0})}},
             res <= res_tol && order_ratio >= 3.0 && order_ratio <= 5.0);
    }

    {
        auto phi = [](std::span<const double> x) {
            double q = 0.0;
            for (double c : x) q += c * c;
            return std::exp(-q);
        };
        std::vector<double> errs =
            delta_limit_errors(model, 0.0, phi, sc.certify.delta_eps);
        LineFit fit = fit_loglog(sc.certify.delta_eps, errs);
        bool decreasing = true;
        for (size_t i = 1; i < errs.size(); ++i)
            decreasing = decreasing && errs[i] < errs[i - 1];
        const bool ok = decreasing && std::isfinite(fit.slope) &&
                        std::abs(fit.slope - 1.0) <= 0.2;
        push(json{{"check", "delta_limit"},
                  {"epsilons", sc.certify.delta_eps},
                  {"errors", errs},
                  {"slope", fit.slope},
                  {"slope_stderr", fit.slope_stderr},
                  {"expected_slope", 1.0},
                  {"slope_tolerance", 0.2}},
             ok);
    }

    json cert{{"command", "certify"},
              {"model", detail::model_kind_name(model)},
              {"dim", n},
              {"certified", all_ok},
              {"checks", checks}};
    detail::write_json_atomic(opt.out_dir / "certificate.json", cert);
    return all_ok ? 0 : 1;
}

/// verify: energy monotonicity, operator-norm step bounds, and decay bounds
/// over the solved trajectory.  reports.jsonl and reports.csv list one
/// verdict per bound; the exit code is nonzero when any bound fails.
inline int run_verify(const Scenario& sc, const RunOptions& opt) {
    const DiffusivityModel& model = sc.require_model();
    const Field u0 = sc.initial.build(sc.grid);
    Trajectory traj = detail::solve_scenario(sc, model, u0);
    SourceFn f = sc.source.active() ? sc.source.build(sc.grid) : SourceFn{};

    std::vector<std::pair<BoundReport, std::string>> rows;
    if (!sc.source.active()) {
        for (double q : sc.verify.energy_qs) {
            char p[32];
            std::snprintf(p, sizeof(p), "q=%g", q);
            for (BoundReport r : check_energy_monotone(traj, q))
                rows.emplace_back(std::move(r), p);
        }
        for (const LpLqTuple& t : sc.verify.lplq) {
            char p[64];
            std::snprintf(p, sizeof(p), "p=%g q=%g r=%g", t.p, t.q, t.r);
            for (BoundReport r : check_lplq_steps(traj, model, t.p, t.q, t.r))
                rows.emplace_back(std::move(r), p);
        }
    }
    for (const DecayParams& d : sc.verify.decay) {
        char p[96];
        std::snprintf(p, sizeof(p), "p=%g q=%g r=%g alpha=%g", d.p, d.q, d.r, d.alpha);
        for (BoundReport r : verify_decay(traj, u0, model, d, f))
            rows.emplace_back(std::move(r), p);
    }

    std::string jsonl;
    std::string csv = "check,params,time,measured,bound,ratio,satisfied\n";
    int violations = 0;
    for (auto& [r, params] : rows) {
        detail::apply_bound_scale(r, opt.bound_scale);
        if (!r.satisfied) ++violations;
        jsonl += detail::report_to_json(r, params).dump() + "\n";
        csv += r.kind + "," + params + "," + detail::fmt_double(r.t) + "," +
               detail::fmt_double(r.measured) + "," + detail::fmt_double(r.bound) +
               "," + detail::fmt_double(r.ratio) + "," +
               (r.satisfied ? "true" : "false") + "\n";
    }
    detail::write_file_atomic(opt.out_dir / "reports.jsonl", jsonl);
    detail::write_file_atomic(opt.out_dir / "reports.csv", csv);
    json summary{{"command", "verify"},
                 {"model", detail::model_kind_name(model)},
                 {"reports", rows.size()},
                 {"violations", violations},
                 {"bound_scale", opt.bound_scale},
                 {"all_satisfied", violations == 0}};
    detail::write_json_atomic(opt.out_dir / "summary.json", summary);
    return violations == 0 ? 0 : 1;
}

/// net: mollified-coefficient diagnostics.  The scenario model is the base;
/// two mollifier choices give nets A and B.  diagnostics.json carries the
/// moderateness, negligibility, and consistency verdicts with their fits.
inline int run_net(const Scenario& sc, const RunOptions& opt) {
    const DiffusivityModel& base = sc.require_model();
    const Field u0 = sc.initial.build(sc.grid);
    SourceFn f = sc.source.active() ? sc.source.build(sc.grid) : SourceFn{};

    EpsNet net_a(sc.net.epsilons, base, sc.net.mollifier_a);
    EpsNet net_b(sc.net.epsilons, base, sc.net.mollifier_b);
    std::vector<Trajectory> sols_a =
        solve_net(net_a, u0, sc.times, f, sc.panels, opt.threads);
    std::vector<Trajectory> sols_b =
        solve_net(net_b, u0, sc.times, f, sc.panels, opt.threads);
    Trajectory reference = detail::solve_scenario(sc, base, u0);

    NetDiagnostics mod =
        moderateness_diagnostic(sc.net.epsilons, sols_a, sc.net.seminorms);
    NetDiagnostics neg =
        negligibility_diagnostic(sc.net.epsilons, sols_a, sols_b, sc.net.seminorms);
    NetDiagnostics cons = consistency_check(sc.net.epsilons, sols_a, reference);

    json out{{"command", "net"},
             {"model", detail::model_kind_name(base)},
             {"mollifier", sc.net.mollifier_a.name()},
             {"mollifier_b", sc.net.mollifier_b.name()},
             {"times", sc.times},
             {"moderateness", detail::diagnostics_to_json(mod)},
             {"negligibility", detail::diagnostics_to_json(neg)},
             {"consistency", detail::diagnostics_to_json(cons)}};
    detail::write_json_atomic(opt.out_dir / "diagnostics.json", out);

    std::string csv = "epsilon";
    for (const std::string& s : mod.seminorms) csv += ",moderate_" + s;
    for (const std::string& s : neg.seminorms) csv += ",difference_" + s;
    csv += ",consistency_" + cons.seminorms.at(0) + "\n";
    for (size_t i = 0; i < sc.net.epsilons.size(); ++i) {
        csv += detail::fmt_double(sc.net.epsilons[i]);
        for (const auto& col : mod.values) csv += "," + detail::fmt_double(col[i]);
        for (const auto& col : neg.values) csv += "," + detail::fmt_double(col[i]);
        csv += "," + detail::fmt_double(cons.values.at(0)[i]) + "\n";
    }
    detail::write_file_atomic(opt.out_dir / "net.csv", csv);

    const bool ok = mod.verdict == "moderate" && neg.verdict == "negligible" &&
                    cons.verdict == "consistent";
    return ok ? 0 : 1;
}

/// Dispatch a subcommand over a scenario file.  Library errors become
/// error.json in the output directory plus a nonzero exit.
inline int run_command(const std::string& command,
                       const std::filesystem::path& scenario_path,
                       RunOptions opt) {
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "cannot create output directory %s\n",
                     opt.out_dir.string().c_str());
        return 1;
    }
    try {
        Scenario sc = parse_scenario_file(scenario_path);
        if (opt.seed) sc.seed = *opt.seed;
        if (command == "solve") return run_solve(sc, opt);
        if (command == "certify") return run_certify(sc, opt);
        if (command == "verify") return run_verify(sc, opt);
        if (command == "net") return run_net(sc, opt);
        throw ValidationError("unknown command '" + command + "'");
    } catch (const Error& e) {
        json err{{"error", e.code()}, {"message", e.what()}};
        if (const auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->line() > 0)
            err["line"] = pe->line();
        detail::write_json_atomic(opt.out_dir / "error.json", err);
        std::fprintf(stderr, "%s: %s\n", e.code().c_str(), e.what());
        return 1;
    }
}

}  // namespace heatprop
