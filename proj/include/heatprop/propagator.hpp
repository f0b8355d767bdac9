#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/fft.hpp"
#include "heatprop/grid.hpp"
#include "heatprop/kernel.hpp"
#include "heatprop/spd.hpp"

namespace heatprop {

/// Time-stamped states of one solve.  States are computed directly from
/// the initial datum, never chained through each other, so errors do not
/// compound along the list.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
};

/// Time-dependent source term: s -> f(s, .) sampled on the solver's grid.
using SourceFn = std::function<Field(double)>;

namespace detail {

inline std::vector<std::complex<double>> field_to_spectrum(const Field& u) {
    std::vector<std::complex<double>> data(u.values.size());
    for (size_t i = 0; i < u.values.size(); ++i) data[i] = u.values[i];
    fft_nd(data, static_cast<size_t>(u.grid.n), u.grid.dim, false);
    return data;
}

/// Fraction of spectral energy in the top octave (per-axis wavenumber
/// magnitude at or above n/4).
inline double top_octave_energy_fraction(const SpatialGrid& grid,
                                         const std::vector<std::complex<double>>& spec) {
    double total = 0.0, top = 0.0;
    const std::int64_t n = grid.n;
    for (size_t flat = 0; flat < spec.size(); ++flat) {
        const double e = std::norm(spec[flat]);
        total += e;
        auto idx = grid.unflatten(flat);
        bool in_top = false;
        for (int d = 0; d < grid.dim; ++d) {
            const std::int64_t k = idx[d] < n / 2 ? idx[d] : n - idx[d];
            if (k >= n / 4) in_top = true;
        }
        if (in_top) top += e;
    }
    return total > 0.0 ? top / total : 0.0;
}

}  // namespace detail

/// Apply the propagator W_{s,t} on the periodic grid: multiply the
/// discrete spectrum by the sampled symbol exp(-<Sigma xi, xi>) with
/// Sigma the accumulated diffusivity on [s, t].  s == t returns the input
/// unchanged.  Advisory flags are set when the grid cannot represent the
/// result faithfully:
///  - kGridTooCoarse when the Nyquist-corner symbol exceeds 0.5 while the
///    input carries more than 1e-6 of its energy in the top octave;
///  - kDomainTruncation when sqrt(lambda_max(Sigma)) exceeds L / 8.
inline Field apply_propagator(const Field& u, const DiffusivityModel& model,
                              double s, double t) {
    if (!(s >= 0.0) || !(t >= s))
        throw ValidationError("propagator requires 0 <= s <= t");
    if (model.dim() != u.grid.dim)
        throw ValidationError("model dimension does not match the grid");
    if (s == t) return u;

    const SpatialGrid& grid = u.grid;
    const SpdMatrix sigma = model.accumulate(s, t);

    auto spec = detail::field_to_spectrum(u);

    std::uint32_t flags = u.flags;
    std::array<double, kMaxDim> xi{};
    for (int d = 0; d < grid.dim; ++d) xi[d] = grid.nyquist_frequency();
    const double nyquist_symbol =
        std::exp(-sigma.quad_form({xi.data(), static_cast<size_t>(grid.dim)}));
    if (nyquist_symbol > 0.5 &&
        detail::top_octave_energy_fraction(grid, spec) > 1e-6)
        flags |= kGridTooCoarse;
    if (std::sqrt(sigma.lambda_max()) > grid.half_width / 8.0)
        flags |= kDomainTruncation;

    // Precompute per-axis frequencies once; the symbol is a quadratic form.
    std::vector<double> freq(static_cast<size_t>(grid.n));
    for (std::int64_t k = 0; k < grid.n; ++k)
        freq[static_cast<size_t>(k)] = grid.frequency(k);

    for (size_t flat = 0; flat < spec.size(); ++flat) {
        auto idx = grid.unflatten(flat);
        for (int d = 0; d < grid.dim; ++d)
            xi[d] = freq[static_cast<size_t>(idx[d])];
        spec[flat] *=
            std::exp(-sigma.quad_form({xi.data(), static_cast<size_t>(grid.dim)}));
    }

    fft_nd(spec, static_cast<size_t>(grid.n), grid.dim, true);

    Field out(grid);
    out.flags = flags;
    double max_imag = 0.0, max_real = 0.0;
    for (size_t i = 0; i < spec.size(); ++i) {
        out.values[i] = spec[i].real();
        max_imag = std::max(max_imag, std::abs(spec[i].imag()));
        max_real = std::max(max_real, std::abs(spec[i].real()));
    }
    // Real input and a real even symbol must give real output; anything
    // else indicates a broken transform.
    if (max_imag > 1e-12 * std::max(max_real, 1e-300))
        throw std::logic_error("propagator output has a non-real residue");
    return out;
}

/// Homogeneous solve: states u(t_i) = W_{0, t_i} u0, each computed
/// directly from u0.
inline Trajectory solve_homogeneous(const Field& u0, const DiffusivityModel& model,
                                    std::vector<double> times) {
    if (times.empty()) throw ValidationError("time list must not be empty");
    for (size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw ValidationError("times must be nonnegative");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ValidationError("times must be strictly increasing");
    }
    Trajectory traj;
    traj.times = std::move(times);
    traj.states.reserve(traj.times.size());
    for (double t : traj.times)
        traj.states.push_back(apply_propagator(u0, model, 0.0, t));
    return traj;
}

/// Inhomogeneous solve by the Duhamel formula at a fixed panel count:
///   u(t) = W_{0,t} u0 + sum over a composite 4-point Gauss-Legendre rule
///          on [0, t] of w_j W_{s_j, t} f(s_j).
/// Each quadrature node costs one propagator application.
inline Field solve_duhamel(const Field& u0, const SourceFn& f,
                           const DiffusivityModel& model, double t, int panels) {
    if (!(t >= 0.0)) throw ValidationError("final time must be nonnegative");
    if (panels < 1) throw ValidationError("panel count must be at least 1");
    Field acc = apply_propagator(u0, model, 0.0, t);
    if (t == 0.0 || !f) return acc;
    const QuadRule& rule = gauss_legendre(4);
    const double dt = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * dt;
        for (int j = 0; j < 4; ++j) {
            const double s = mid + 0.5 * dt * rule.nodes[j];
            const double w = 0.5 * dt * rule.weights[j];
            Field fs = f(s);
            if (!(fs.grid == u0.grid))
                throw ValidationError("source field grid does not match u0");
            Field prop = apply_propagator(fs, model, s, t);
            for (size_t i = 0; i < acc.values.size(); ++i)
                acc.values[i] += w * prop.values[i];
            acc.flags |= prop.flags;
        }
    }
    return acc;
}

struct DuhamelOptions {
    double rel_tol = 1e-8;
    int max_panels = 64;
    int start_panels = 2;
};

/// Duhamel solve with panel doubling until the relative L2 change falls
/// below rel_tol.  Throws QuadratureFailure if the cap is reached while
/// the result is still moving.
inline Field solve_duhamel_adaptive(const Field& u0, const SourceFn& f,
                                    const DiffusivityModel& model, double t,
                                    const DuhamelOptions& opts = {}) {
    auto l2 = [&](const Field& v) {
        double s = 0.0;
        for (double x : v.values) s += x * x;
        return std::sqrt(s * v.grid.cell_volume());
    };
    Field prev = solve_duhamel(u0, f, model, t, opts.start_panels);
    for (int panels = opts.start_panels * 2; panels <= opts.max_panels; panels *= 2) {
        Field next = solve_duhamel(u0, f, model, t, panels);
        Field diff = next;
        for (size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= prev.values[i];
        if (l2(diff) <= opts.rel_tol * std::max(l2(next), 1e-300)) return next;
        prev = std::move(next);
    }
    throw QuadratureFailure("Duhamel quadrature did not settle within " +
                            std::to_string(opts.max_panels) + " panels");
}

/// Sup-norm identity-limit errors ||W_{s - eps, s + eps} u0 - u0||_inf for
/// a list of widths.  The propagator tends to the identity at first order,
/// so the errors decay linearly in eps for resolved data.
inline std::vector<double> identity_limit_check(const Field& u0,
                                                const DiffusivityModel& model,
                                                double s,
                                                std::span<const double> eps_list) {
    std::vector<double> errors;
    errors.reserve(eps_list.size());
    for (double eps : eps_list) {
        if (!(eps >= 0.0)) throw ValidationError("widths must be nonnegative");
        if (!(s - eps >= 0.0))
            throw ValidationError("identity limit requires s - eps >= 0");
        if (eps == 0.0) {
            errors.push_back(0.0);
            continue;
        }
        Field moved = apply_propagator(u0, model, s - eps, s + eps);
        double m = 0.0;
        for (size_t i = 0; i < moved.values.size(); ++i)
            m = std::max(m, std::abs(moved.values[i] - u0.values[i]));
        errors.push_back(m);
    }
    return errors;
}

/// Spectral partial derivative along one axis (Nyquist mode zeroed).
inline Field spectral_derivative(const Field& u, int axis) {
    if (axis < 0 || axis >= u.grid.dim) throw ValidationError("bad derivative axis");
    auto spec = detail::field_to_spectrum(u);
    const SpatialGrid& grid = u.grid;
    for (size_t flat = 0; flat < spec.size(); ++flat) {
        auto idx = grid.unflatten(flat);
        const std::int64_t k = idx[axis];
        if (k == grid.n / 2) {
            spec[flat] = 0.0;
        } else {
            spec[flat] *= std::complex<double>(0.0, grid.frequency(k));
        }
    }
    fft_nd(spec, static_cast<size_t>(grid.n), grid.dim, true);
    Field out(grid);
    out.flags = u.flags;
    for (size_t i = 0; i < spec.size(); ++i) out.values[i] = spec[i].real();
    return out;
}

}  // namespace heatprop
