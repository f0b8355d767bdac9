#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/quadrature.hpp"
#include "heatprop/spd.hpp"

namespace heatprop {

/// Cached data of the Gaussian kernel
///   W(x) = ((4 pi)^n det Sigma)^{-1/2} exp(-<x, Sigma^{-1} x> / 4)
/// for one SPD covariance-like matrix Sigma.  Its Fourier transform is
/// exp(-<Sigma xi, xi>) under the convention
///   g(x) = (2 pi)^{-n} integral ghat(xi) exp(i<x, xi>) dxi.
class KernelParams {
public:
    explicit KernelParams(const SpdMatrix& sigma)
        : sigma_(sigma),
          inv_sigma_(sigma.inverse()),
          det_sigma_(sigma.determinant()),
          norm_factor_(1.0 /
                       std::sqrt(std::pow(4.0 * std::numbers::pi, sigma.dim()) *
                                 sigma.determinant())) {}

    int dim() const { return sigma_.dim(); }
    const SpdMatrix& sigma() const { return sigma_; }
    const SpdMatrix& inv_sigma() const { return inv_sigma_; }
    double det_sigma() const { return det_sigma_; }

private:
    SpdMatrix sigma_;
    SpdMatrix inv_sigma_;
    double det_sigma_;
    double norm_factor_;

    friend double kernel_eval(std::span<const double>, const KernelParams&);
    friend double kernel_p_norm(const KernelParams&, double);
};

/// Pointwise kernel value W(x).
inline double kernel_eval(std::span<const double> x, const KernelParams& kp) {
    return kp.norm_factor_ * std::exp(-0.25 * kp.inv_sigma_.quad_form(x));
}

/// Fourier symbol exp(-<Sigma xi, xi>).
inline double symbol_eval(std::span<const double> xi, const KernelParams& kp) {
    return std::exp(-kp.sigma().quad_form(xi));
}

/// Closed-form Lebesgue norm of the kernel,
///   ||W||_p = p^{-n/(2p)} ((4 pi)^n det Sigma)^{-(p-1)/(2p)},
/// with the limiting cases ||W||_1 = 1 and
/// ||W||_inf = ((4 pi)^n det Sigma)^{-1/2}.  Requires p >= 1.
inline double kernel_p_norm(const KernelParams& kp, double p) {
    if (std::isinf(p)) return kp.norm_factor_;
    if (!(p >= 1.0)) throw BadExponent("kernel p-norm requires p >= 1");
    const double n = kp.dim();
    const double base = std::pow(4.0 * std::numbers::pi, n) * kp.det_sigma();
    return std::pow(p, -n / (2.0 * p)) * std::pow(base, -(p - 1.0) / (2.0 * p));
}

/// Quadrature settings for dense kernel integrals.  The default is a
/// tensor-product Gauss-Legendre rule on an axis-aligned box reaching
/// sigma_multiple marginal standard deviations per coordinate (the
/// marginal variance along axis i is 2 Sigma_ii, so the Gaussian mass
/// outside the default box is below n * erfc(10 / sqrt(2)) ~ 6e-23).
/// A Monte Carlo fallback is available for spot checks in higher
/// dimensions where a tensor grid would be too dense.
struct QuadSpec {
    enum class Method { TensorGauss, MonteCarlo };
    Method method = Method::TensorGauss;
    int nodes_per_axis = 0;  // 0: 200 per axis for n <= 2, else 96
    double sigma_multiple = 10.0;
    std::uint64_t mc_samples = 10'000'000;
    std::uint64_t mc_seed = 42;
};

/// Scalar integral result; stderr_estimate is zero for deterministic rules.
struct QuadResult {
    double value = 0.0;
    double stderr_estimate = 0.0;
};

/// Integral of W(x) * weight(x) over the quadrature box.  The unweighted
/// version (weight absent) is the kernel mass, which must equal 1.
inline QuadResult kernel_integral(
    const KernelParams& kp, const QuadSpec& spec = {},
    const std::function<double(std::span<const double>)>& weight = {}) {
    const int n = kp.dim();
    std::array<double, kMaxDim> half_width{};
    for (int i = 0; i < n; ++i)
        half_width[i] = spec.sigma_multiple * std::sqrt(2.0 * kp.sigma().at(i, i));

    if (spec.method == QuadSpec::Method::MonteCarlo) {
        std::mt19937_64 rng(spec.mc_seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        double volume = 1.0;
        for (int i = 0; i < n; ++i) volume *= 2.0 * half_width[i];
        double sum = 0.0, sum_sq = 0.0;
        std::array<double, kMaxDim> x{};
        for (std::uint64_t s = 0; s < spec.mc_samples; ++s) {
            for (int i = 0; i < n; ++i) x[i] = half_width[i] * unif(rng);
            std::span<const double> xs{x.data(), static_cast<size_t>(n)};
            double v = kernel_eval(xs, kp);
            if (weight) v *= weight(xs);
            sum += v;
            sum_sq += v * v;
        }
        const double m = sum / static_cast<double>(spec.mc_samples);
        const double var =
            std::max(0.0, sum_sq / static_cast<double>(spec.mc_samples) - m * m);
        return {volume * m,
                volume * std::sqrt(var / static_cast<double>(spec.mc_samples))};
    }

    const int nodes = spec.nodes_per_axis > 0 ? spec.nodes_per_axis
                                              : (n <= 2 ? 200 : 96);
    const QuadRule& rule = gauss_legendre(nodes);
    std::array<int, kMaxDim> idx{};
    std::array<double, kMaxDim> x{};
    double total = 0.0;
    // Odometer loop over the tensor grid.
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            x[i] = half_width[i] * rule.nodes[idx[i]];
            w *= half_width[i] * rule.weights[idx[i]];
        }
        std::span<const double> xs{x.data(), static_cast<size_t>(n)};
        double v = kernel_eval(xs, kp);
        if (weight) v *= weight(xs);
        total += w * v;
        int axis = 0;
        while (axis < n && ++idx[axis] == nodes) idx[axis++] = 0;
        if (axis == n) break;
    }
    return {total, 0.0};
}

/// Kernel mass by dense quadrature; the analytic value is exactly 1.
inline double kernel_mass(const KernelParams& kp, const QuadSpec& spec = {}) {
    return kernel_integral(kp, spec).value;
}

/// ||W||_p by dense quadrature (for cross-checking the closed form).
inline double kernel_p_norm_quadrature(const KernelParams& kp, double p,
                                       const QuadSpec& spec = {}) {
    if (!(p >= 1.0)) throw BadExponent("kernel p-norm requires p >= 1");
    QuadResult r = kernel_integral(kp, spec, [&](std::span<const double> x) {
        return std::pow(kernel_eval(x, kp), p - 1.0);
    });
    return std::pow(r.value, 1.0 / p);
}

/// Pointwise residual of the kernel family under the heat operator,
///   | d/dt W(x; s, t) - sum_ij a_ij(t) d^2/dx_i dx_j W(x; s, t) |,
/// with second-order central differences of step h in both t and x.
/// The kernel is evaluated from the model through its accumulated
/// covariance, so the residual measures the whole chain.
inline double heat_residual(const DiffusivityModel& model,
                            std::span<const double> x, double s, double t,
                            double h = 1e-4) {
    if (!(t - h > s)) throw ValidationError("heat residual requires t - h > s");
    const int n = model.dim();
    auto kernel_at = [&](double tt) {
        return KernelParams(model.accumulate(s, tt));
    };
    const KernelParams kp_mid = kernel_at(t);
    const double dt = (kernel_eval(x, kernel_at(t + h)) -
                       kernel_eval(x, kernel_at(t - h))) /
                      (2.0 * h);

    const SpdMatrix a_t = model.eval(t);
    std::array<double, kMaxDim> xp{};
    for (int i = 0; i < n; ++i) xp[i] = x[i];
    std::span<double> xs{xp.data(), static_cast<size_t>(n)};
    auto eval_shifted = [&](int i, double di, int j, double dj) {
        xp[i] += di;
        xp[j] += dj;
        const double v = kernel_eval(xs, kp_mid);
        xp[i] = x[i];
        xp[j] = x[j];
        return v;
    };

    const double center = kernel_eval(xs, kp_mid);
    double lap = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dii = (eval_shifted(i, h, i, 0.0) - 2.0 * center +
                            eval_shifted(i, -h, i, 0.0)) /
                           (h * h);
        lap += a_t.at(i, i) * dii;
        for (int j = i + 1; j < n; ++j) {
            const double dij = (eval_shifted(i, h, j, h) - eval_shifted(i, h, j, -h) -
                                eval_shifted(i, -h, j, h) +
                                eval_shifted(i, -h, j, -h)) /
                               (4.0 * h * h);
            lap += 2.0 * a_t.at(i, j) * dij;
        }
    }
    return std::abs(dt - lap);
}

/// Errors |integral W(.; s, s + eps) phi - phi(0)| for a list of widths.
/// As eps -> 0 the kernel family acts as a delta at the origin and the
/// error decays at first order in eps.
inline std::vector<double> delta_limit_errors(
    const DiffusivityModel& model, double s,
    const std::function<double(std::span<const double>)>& phi,
    std::span<const double> eps_list, const QuadSpec& spec = {}) {
    std::vector<double> errors;
    errors.reserve(eps_list.size());
    std::array<double, kMaxDim> origin{};
    const double phi0 = phi({origin.data(), static_cast<size_t>(model.dim())});
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw ValidationError("delta-limit widths must be positive");
        KernelParams kp(model.accumulate(s, s + eps));
        errors.push_back(std::abs(kernel_integral(kp, spec, phi).value - phi0));
    }
    return errors;
}

}  // namespace heatprop
