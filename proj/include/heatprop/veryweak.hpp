#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/estimates.hpp"
#include "heatprop/mollifier.hpp"
#include "heatprop/parallel.hpp"
#include "heatprop/propagator.hpp"
#include "heatprop/statistics.hpp"

namespace heatprop {

/// Seminorms used to grade net behavior: both take a sup over the time
/// window.  SupL2 is the plain L2 norm; SupH1 is the L2 norm of the
/// spectral gradient.
enum class SeminormKind { SupL2, SupH1 };

inline std::string seminorm_name(SeminormKind k) {
    return k == SeminormKind::SupL2 ? "sup_t_l2" : "sup_t_h1";
}

inline double state_seminorm(const Field& u, SeminormKind kind) {
    if (kind == SeminormKind::SupL2) return lq_norm(u, 2.0);
    double sq = 0.0;
    for (int axis = 0; axis < u.grid.dim; ++axis)
        sq += energy(spectral_derivative(u, axis), 2.0);
    return std::sqrt(sq);
}

inline double trajectory_seminorm(const Trajectory& traj, SeminormKind kind) {
    double m = 0.0;
    for (const Field& u : traj.states) m = std::max(m, state_seminorm(u, kind));
    return m;
}

/// Geometric default width grid: 13 points from 1e-1 down to 1e-4
/// (ratio 10^{-1/4}).
inline std::vector<double> default_epsilon_grid() {
    std::vector<double> eps(13);
    for (int i = 0; i < 13; ++i) eps[i] = std::pow(10.0, -1.0 - 0.25 * i);
    return eps;
}

/// A mollified family a_eps = a * psi_eps over a decreasing width list.
/// Widths must stay below half the base model's breakpoint clearance so
/// neighbouring jumps never blur into each other.
struct EpsNet {
    std::vector<double> epsilons;
    DiffusivityModel base;
    MollifierSpec psi;

    EpsNet(std::vector<double> eps, DiffusivityModel base_model, MollifierSpec psi_)
        : epsilons(std::move(eps)), base(std::move(base_model)), psi(psi_) {
        if (epsilons.empty()) throw ValidationError("epsilon list must not be empty");
        const double clearance = base.breakpoint_clearance();
        for (size_t i = 0; i < epsilons.size(); ++i) {
            if (!(epsilons[i] > 0.0))
                throw ValidationError("epsilon values must be positive");
            if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
                throw ValidationError("epsilon list must be strictly decreasing");
            if (!(epsilons[i] < 0.5 * clearance))
                throw ValidationError(
                    "epsilon " + std::to_string(epsilons[i]) +
                    " is not below half the breakpoint clearance " +
                    std::to_string(clearance));
        }
    }

    DiffusivityModel model_at(double eps) const { return mollify(base, eps, psi); }
};

/// Solve the whole net: one trajectory per width, homogeneous when f is
/// empty, Duhamel otherwise.  Failures are annotated with the width that
/// produced them.
inline std::vector<Trajectory> solve_net(const EpsNet& net, const Field& u0,
                                         const std::vector<double>& times,
                                         const SourceFn& f = {}, int panels = 16,
                                         int threads = 1) {
    std::vector<Trajectory> out(net.epsilons.size());
    std::vector<std::string> failures(net.epsilons.size());
    parallel_for(net.epsilons.size(), threads, [&](std::size_t i) {
        try {
            const DiffusivityModel model = net.model_at(net.epsilons[i]);
            if (!f) {
                out[i] = solve_homogeneous(u0, model, times);
            } else {
                Trajectory traj;
                traj.times = times;
                for (double t : times)
                    traj.states.push_back(solve_duhamel(u0, f, model, t, panels));
                out[i] = std::move(traj);
            }
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw ValidationError("net solve failed at epsilon = " +
                                  std::to_string(net.epsilons[i]) + ": " +
                                  failures[i]);
    return out;
}

struct SlopeFit {
    std::string seminorm;
    double slope = 0.0;
    double stderr_ = 0.0;
    double intercept = 0.0;
    int points = 0;
};

/// Outcome of one net diagnostic.  values[k][i] is seminorm k of the net
/// member with width epsilons[i].  Every fitted slope carries its standard
/// error; verdicts require stderr < 0.2 and at least 6 widths.
struct NetDiagnostics {
    std::string kind;
    std::vector<double> epsilons;
    std::vector<std::string> seminorms;
    std::vector<std::vector<double>> values;
    std::vector<SlopeFit> fits;
    std::string verdict;
    int moderateness_order = -1;
};

inline constexpr double kVerdictMaxStderr = 0.2;
inline constexpr int kVerdictMinPoints = 6;

namespace detail {

inline SlopeFit fit_against(const std::vector<double>& scales,
                            const std::vector<double>& values,
                            const std::string& name) {
    LineFit lf = fit_loglog(scales, values);
    SlopeFit f;
    f.seminorm = name;
    f.slope = lf.slope;
    f.stderr_ = lf.slope_stderr;
    f.intercept = lf.intercept;
    f.points = lf.points == 0 ? static_cast<int>(values.size()) : lf.points;
    return f;
}

inline bool fits_trustworthy(const std::vector<SlopeFit>& fits) {
    for (const auto& f : fits)
        if (!(f.stderr_ < kVerdictMaxStderr) || f.points < kVerdictMinPoints)
            return false;
    return true;
}

}  // namespace detail

/// Moderateness: seminorms may grow at most polynomially in 1/eps.  Fits
/// log(seminorm) against log(1/eps); the reported order is the largest
/// fitted growth exponent rounded up, with a small noise margin so flat
/// nets report order zero.
inline NetDiagnostics moderateness_diagnostic(
    const std::vector<double>& epsilons, const std::vector<Trajectory>& solutions,
    const std::vector<SeminormKind>& kinds) {
    if (epsilons.size() != solutions.size())
        throw MismatchedNets("width list and solution list differ in length");
    NetDiagnostics d;
    d.kind = "moderateness";
    d.epsilons = epsilons;
    std::vector<double> inv_eps;
    for (double e : epsilons) inv_eps.push_back(1.0 / e);
    double max_slope = 0.0;
    for (SeminormKind k : kinds) {
        std::vector<double> vals;
        for (const auto& traj : solutions) vals.push_back(trajectory_seminorm(traj, k));
        d.seminorms.push_back(seminorm_name(k));
        d.values.push_back(vals);
        d.fits.push_back(detail::fit_against(inv_eps, vals, seminorm_name(k)));
        max_slope = std::max(max_slope, d.fits.back().slope);
    }
    if (detail::fits_trustworthy(d.fits)) {
        d.verdict = "moderate";
        d.moderateness_order =
            std::max(0, static_cast<int>(std::ceil(max_slope - 0.05)));
    } else {
        d.verdict = "inconclusive";
    }
    return d;
}

/// Negligibility: the two nets must share widths, grids, and times; the
/// member-wise differences should vanish with eps.  Decay slopes of at
/// least one are treated as evidence; identically zero differences short-
/// circuit to a negligible verdict with an infinite slope.
inline NetDiagnostics negligibility_diagnostic(
    const std::vector<double>& epsilons, const std::vector<Trajectory>& net_a,
    const std::vector<Trajectory>& net_b, const std::vector<SeminormKind>& kinds) {
    if (net_a.size() != net_b.size() || net_a.size() != epsilons.size())
        throw MismatchedNets("nets differ in length");
    for (size_t i = 0; i < net_a.size(); ++i) {
        if (net_a[i].times != net_b[i].times)
            throw MismatchedNets("nets differ in time lists");
        for (size_t j = 0; j < net_a[i].states.size(); ++j)
            if (!(net_a[i].states[j].grid == net_b[i].states[j].grid))
                throw MismatchedNets("nets differ in grids");
    }
    NetDiagnostics d;
    d.kind = "negligibility";
    d.epsilons = epsilons;
    bool all_zero = true;
    for (SeminormKind k : kinds) {
        std::vector<double> vals;
        for (size_t i = 0; i < net_a.size(); ++i) {
            Trajectory diff = net_a[i];
            for (size_t j = 0; j < diff.states.size(); ++j)
                for (size_t c = 0; c < diff.states[j].values.size(); ++c)
                    diff.states[j].values[c] -= net_b[i].states[j].values[c];
            vals.push_back(trajectory_seminorm(diff, k));
        }
        for (double v : vals)
            if (v != 0.0) all_zero = false;
        d.seminorms.push_back(seminorm_name(k));
        d.values.push_back(vals);
        d.fits.push_back(detail::fit_against(epsilons, vals, seminorm_name(k)));
    }
    if (all_zero) {
        d.verdict = "negligible";
        return d;
    }
    double min_slope = d.fits.front().slope;
    for (const auto& f : d.fits) min_slope = std::min(min_slope, f.slope);
    if (detail::fits_trustworthy(d.fits))
        d.verdict = min_slope >= 0.9 ? "negligible" : "inconclusive";
    else
        d.verdict = "inconclusive";
    return d;
}

/// Consistency: distance of each net member to a reference solve of the
/// unregularized model, in the sup-over-times L2 norm, fitted against eps.
inline NetDiagnostics consistency_check(const std::vector<double>& epsilons,
                                        const std::vector<Trajectory>& net,
                                        const Trajectory& reference) {
    if (net.size() != epsilons.size())
        throw MismatchedNets("width list and net differ in length");
    NetDiagnostics d;
    d.kind = "consistency";
    d.epsilons = epsilons;
    std::vector<double> vals;
    for (const auto& traj : net) {
        if (traj.times != reference.times)
            throw MismatchedNets("net and reference differ in time lists");
        double m = 0.0;
        for (size_t j = 0; j < traj.states.size(); ++j) {
            Field diff = traj.states[j];
            for (size_t c = 0; c < diff.values.size(); ++c)
                diff.values[c] -= reference.states[j].values[c];
            m = std::max(m, lq_norm(diff, 2.0));
        }
        vals.push_back(m);
    }
    d.seminorms.push_back(seminorm_name(SeminormKind::SupL2));
    d.values.push_back(vals);
    bool all_zero = true;
    for (double v : vals)
        if (v != 0.0) all_zero = false;
    d.fits.push_back(detail::fit_against(epsilons, vals,
                                         seminorm_name(SeminormKind::SupL2)));
    if (all_zero) {
        d.verdict = "consistent";
        return d;
    }
    if (detail::fits_trustworthy(d.fits))
        d.verdict = d.fits.front().slope >= 0.9 ? "consistent" : "inconclusive";
    else
        d.verdict = "inconclusive";
    return d;
}

}  // namespace heatprop
