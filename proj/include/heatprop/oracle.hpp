#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/grid.hpp"
#include "heatprop/kernel.hpp"
#include "heatprop/spd.hpp"

namespace heatprop {

/// Centered Gaussian profile amplitude * W(.; sigma0), closed under the
/// propagator: covariances add.  Serves as an independent reference for
/// the spectral solver.
struct GaussianState {
    SpdMatrix sigma0;
    double amplitude = 1.0;
};

/// Exact evolution of a Gaussian state: the covariance grows by the
/// accumulated diffusivity, the amplitude is untouched (mass conservation).
inline GaussianState gaussian_evolve(const GaussianState& g,
                                     const DiffusivityModel& model, double s,
                                     double t) {
    if (s == t) return g;
    SymMat grown = g.sigma0.sym() + model.accumulate_sym(s, t);
    return {SpdMatrix(grown), g.amplitude};
}

inline Field field_from_gaussian(const SpatialGrid& grid, const GaussianState& g) {
    if (g.sigma0.dim() != grid.dim)
        throw ValidationError("Gaussian state dimension does not match grid");
    KernelParams kp(g.sigma0);
    return sample_field(grid, [&](std::span<const double> x) {
        return g.amplitude * kernel_eval(x, kp);
    });
}

/// Dense periodic convolution with the kernel: a quadratic-cost reference
/// for the spectral propagator on small grids.  The periodic kernel is
/// truncated at three images per axis (the canonical displacement plus one
/// wrap each way), so the neglected images sit at distance 3L or more and
/// contribute below a Gaussian tail of exp(-9 L^2 / (4 lambda_max)).
/// Refuses grids above 2^16 total points.
inline Field direct_convolution(const Field& u, const KernelParams& kp) {
    const SpatialGrid& grid = u.grid;
    if (grid.total_points() > (1u << 16))
        throw GridTooLarge("direct convolution capped at 2^16 grid points");
    if (kp.dim() != grid.dim)
        throw ValidationError("kernel dimension does not match grid");

    // Tabulate the periodized kernel on all displacement offsets.
    const std::int64_t n = grid.n;
    const double period = 2.0 * grid.half_width;
    std::vector<double> table(grid.total_points());
    std::array<double, 3> d{};
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        const auto idx = grid.unflatten(flat);
        std::array<std::array<double, 3>, 3> images{};
        for (int axis = 0; axis < grid.dim; ++axis) {
            double delta = grid.spacing() * static_cast<double>(idx[axis]);
            delta -= period * std::round(delta / period);
            images[axis] = {delta - period, delta, delta + period};
        }
        double sum = 0.0;
        std::array<int, 3> im{};
        while (true) {
            for (int axis = 0; axis < grid.dim; ++axis)
                d[axis] = images[axis][static_cast<size_t>(im[axis])];
            sum += kernel_eval({d.data(), static_cast<size_t>(grid.dim)}, kp);
            int axis = 0;
            while (axis < grid.dim && ++im[axis] == 3) im[axis++] = 0;
            if (axis == grid.dim) break;
        }
        table[flat] = sum;
    }

    Field out(grid);
    out.flags = u.flags;
    const double volume = grid.cell_volume();
    const auto mod_n = [n](std::int64_t v) { return ((v % n) + n) % n; };
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const auto xi = grid.unflatten(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < u.values.size(); ++j) {
            const auto xj = grid.unflatten(j);
            std::size_t diff_flat = 0;
            for (int axis = 0; axis < grid.dim; ++axis)
                diff_flat = diff_flat * static_cast<std::size_t>(n) +
                            static_cast<std::size_t>(mod_n(xi[axis] - xj[axis]));
            acc += u.values[j] * table[diff_flat];
        }
        out.values[i] = acc * volume;
    }
    return out;
}

}  // namespace heatprop
