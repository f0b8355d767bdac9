#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/grid.hpp"
#include "heatprop/kernel.hpp"
#include "heatprop/propagator.hpp"
#include "heatprop/quadrature.hpp"

namespace heatprop {

/// Multiplicative slack applied when comparing a measured quantity against
/// its bound; covers roundoff, never modeling error.
inline constexpr double kBoundSlack = 1e-9;

/// One measured-versus-bound record.  ratio = measured / bound (zero when
/// the bound is infinite), satisfied means measured <= bound * (1 + slack).
struct BoundReport {
    std::string kind;
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    bool satisfied = false;
    double tolerance = kBoundSlack;
};

inline BoundReport make_report(std::string kind, double t, double measured,
                               double bound) {
    BoundReport r;
    r.kind = std::move(kind);
    r.t = t;
    r.measured = measured;
    r.bound = bound;
    r.ratio = std::isinf(bound) ? 0.0 : measured / bound;
    r.satisfied = measured <= bound * (1.0 + kBoundSlack) || std::isinf(bound);
    return r;
}

/// Riemann energy E_q(v) = sum |v_i|^q * cell volume.  Requires q >= 1.
inline double energy(const Field& v, double q) {
    if (!(q >= 1.0)) throw BadExponent("energy requires q >= 1");
    double s = 0.0;
    for (double x : v.values) s += std::pow(std::abs(x), q);
    return s * v.grid.cell_volume();
}

/// Discrete Lebesgue norm; q may be infinite (sup norm).
inline double lq_norm(const Field& v, double q) {
    if (std::isinf(q)) return v.max_abs();
    if (!(q >= 1.0)) throw BadExponent("norm requires q >= 1");
    return std::pow(energy(v, q), 1.0 / q);
}

/// Per-step energy monotonicity reports: E_q(u(t_i)) against E_q(u(t_{i-1})).
inline std::vector<BoundReport> check_energy_monotone(const Trajectory& traj,
                                                      double q) {
    std::vector<BoundReport> reports;
    for (size_t i = 1; i < traj.states.size(); ++i) {
        reports.push_back(make_report("energy", traj.times[i],
                                      energy(traj.states[i], q),
                                      energy(traj.states[i - 1], q)));
    }
    return reports;
}

inline void require_young(double p, double q, double r) {
    if (!(p >= 1.0) || std::isinf(p)) throw BadExponent("p must lie in [1, inf)");
    if (!(q >= 1.0) || std::isinf(q)) throw BadExponent("q must lie in [1, inf)");
    if (!(r >= 1.0) || std::isinf(r)) throw BadExponent("r must lie in [1, inf)");
    if (std::abs(1.0 / p + 1.0 / q - 1.0 / r - 1.0) > 1e-12)
        throw ExponentMismatch("1/p + 1/q = 1/r + 1 fails for (p, q, r) = (" +
                               std::to_string(p) + ", " + std::to_string(q) + ", " +
                               std::to_string(r) + ")");
}

/// Operator norm bound of W_{s,t} from L^q to L^r under the Young relation
/// 1/p + 1/q = 1/r + 1: the L^p norm of the kernel with covariance
/// accumulated over [s, t].
inline double lplq_operator_bound(const DiffusivityModel& model, double s, double t,
                                  double p, double q, double r) {
    require_young(p, q, r);
    if (!(s < t)) throw ValidationError("operator bound requires s < t");
    return kernel_p_norm(KernelParams(model.accumulate(s, t)), p);
}

namespace detail {

/// Integral over [0, t] of (F(t) - F(s))^{-theta} ds, theta in [0, 1).
/// Uses a geometric mesh in u = t - s graded toward the singular end,
/// 15-point panels, and an exact local stub below the smallest cut where
/// F is indistinguishable from its linearization.
inline double singular_decay_integral(const DiffusivityModel& model, double t,
                                      double theta) {
    if (theta == 0.0) return t;
    const double f_t = model.decay_budget(t);
    constexpr int kPanels = 63;
    const double ratio = std::pow(10.0, -12.0 / kPanels);
    // Ascending list of s nodes so F can be accumulated incrementally.
    std::vector<double> edges(kPanels + 1);
    for (int k = 0; k <= kPanels; ++k) edges[k] = t * std::pow(ratio, k);
    const QuadRule& rule = gauss_legendre(15);
    struct Node {
        double s, w;
    };
    std::vector<Node> nodes;
    nodes.reserve(kPanels * 15);
    for (int k = 0; k < kPanels; ++k) {
        const double lo = t - edges[k], hi = t - edges[k + 1];
        for (int j = 0; j < 15; ++j)
            nodes.push_back({0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[j],
                             0.5 * (hi - lo) * rule.weights[j]});
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.s < b.s; });
    double integral = 0.0;
    double f_cursor = 0.0, s_cursor = 0.0;
    const bool exact_f =
        model.kind() == DiffusivityModel::Kind::Constant ||
        model.kind() == DiffusivityModel::Kind::PiecewiseConstant;
    for (const Node& nd : nodes) {
        double f_s;
        if (exact_f) {
            f_s = model.decay_budget(nd.s);
        } else {
            f_cursor += integrate_scalar(
                [&](double tau) { return model.eval(tau).lambda_min(); }, s_cursor,
                nd.s, 1e-11, 40);
            s_cursor = nd.s;
            f_s = f_cursor;
        }
        integral += nd.w * std::pow(f_t - f_s, -theta);
    }
    // Stub on [t - u_min, t]: F(t) - F(s) ~ c (t - s) with the measured
    // local slope c.
    const double u_min = edges[kPanels];
    const double f_near = exact_f ? model.decay_budget(t - u_min)
                                  : f_cursor + integrate_scalar(
                                        [&](double tau) {
                                            return model.eval(tau).lambda_min();
                                        },
                                        s_cursor, t - u_min, 1e-11, 40);
    const double slope = (f_t - f_near) / u_min;
    integral += std::pow(slope, -theta) * std::pow(u_min, 1.0 - theta) / (1.0 - theta);
    return integral;
}

}  // namespace detail

/// Time-decay envelope for ||u(t)||_r:
///   C F(t)^{-n(p-1)/(2p)} ||u0||_q
///     + C || ||f||_q ||_{L^beta(0,t)} (integral_0^t (F(t)-F(s))^{-n(p-1)alpha/(2p)} ds)^{1/alpha}
/// with C = p^{-n/(2p)} (4 pi)^{-n(p-1)/(2p)}, beta the conjugate of alpha,
/// and F the decay budget.  Requires the subcritical condition
/// n(p-1)alpha < 2p; the bound is +inf at t = 0.
inline double decay_bound(const DiffusivityModel& model, double t, double p,
                          double q, double r, double alpha, double u0_norm,
                          double f_beta_norm) {
    require_young(p, q, r);
    if (!(alpha > 1.0) || std::isinf(alpha))
        throw BadExponent("alpha must lie in (1, inf)");
    if (!(t >= 0.0)) throw ValidationError("decay bound requires t >= 0");
    const double n = model.dim();
    const double theta1 = n * (p - 1.0) / (2.0 * p);
    if (!(n * (p - 1.0) * alpha < 2.0 * p))
        throw AssumptionViolated("subcritical condition n(p-1)alpha < 2p fails");
    const double c = std::pow(p, -n / (2.0 * p)) *
                     std::pow(4.0 * std::numbers::pi, -theta1);
    if (t == 0.0)
        return theta1 > 0.0 ? std::numeric_limits<double>::infinity()
                            : c * (u0_norm + 0.0);
    const double f_t = model.decay_budget(t);
    double bound = c * std::pow(f_t, -theta1) * u0_norm;
    if (f_beta_norm > 0.0) {
        const double integral =
            detail::singular_decay_integral(model, t, theta1 * alpha);
        bound += c * f_beta_norm * std::pow(integral, 1.0 / alpha);
    }
    return bound;
}

struct DecayParams {
    double p = 1.0;
    double q = 2.0;
    double r = 2.0;
    double alpha = 2.0;
};

/// Decay reports for a trajectory solved from u0 (plus an optional source).
/// Times equal to zero give an infinite bound and are trivially satisfied.
inline std::vector<BoundReport> verify_decay(const Trajectory& traj, const Field& u0,
                                             const DiffusivityModel& model,
                                             const DecayParams& params,
                                             const SourceFn& f = {}) {
    const double u0_norm = lq_norm(u0, params.q);
    const double beta = params.alpha / (params.alpha - 1.0);
    std::vector<BoundReport> reports;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const double t = traj.times[i];
        double f_beta_norm = 0.0;
        if (f && t > 0.0) {
            const double integral = integrate_scalar(
                [&](double s) { return std::pow(lq_norm(f(s), params.q), beta); },
                0.0, t, 1e-9, 24);
            f_beta_norm = std::pow(integral, 1.0 / beta);
        }
        const double bound = decay_bound(model, t, params.p, params.q, params.r,
                                         params.alpha, u0_norm, f_beta_norm);
        reports.push_back(make_report("decay", t, lq_norm(traj.states[i], params.r),
                                      bound));
    }
    return reports;
}

/// Step-to-step domination reports: ||u(t_i)||_r against the operator bound
/// applied to ||u(t_{i-1})||_q, using the two-parameter structure.
inline std::vector<BoundReport> check_lplq_steps(const Trajectory& traj,
                                                 const DiffusivityModel& model,
                                                 double p, double q, double r) {
    std::vector<BoundReport> reports;
    for (size_t i = 1; i < traj.states.size(); ++i) {
        const double bound =
            lplq_operator_bound(model, traj.times[i - 1], traj.times[i], p, q, r) *
            lq_norm(traj.states[i - 1], q);
        reports.push_back(
            make_report("lplq", traj.times[i], lq_norm(traj.states[i], r), bound));
    }
    return reports;
}

}  // namespace heatprop
