#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "heatprop/errors.hpp"

namespace heatprop {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// Legendre polynomial P_n and its derivative at x, by recurrence.
inline std::pair<double, double> legendre_pd(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double d = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, d};
}

inline QuadRule make_gauss_legendre(int n) {
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-like initial guess, then Newton.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_pd(n, x);
            double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        auto [p, d] = legendre_pd(n, x);
        (void)p;
        double w = 2.0 / ((1.0 - x * x) * d * d);
        r.nodes[i] = -x;
        r.weights[i] = w;
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace detail

/// Shared, lazily built Gauss-Legendre rule of order n.
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::make_gauss_legendre(n)).first;
    return it->second;
}

namespace detail {

template <class F>
auto gl15_panel(F&& f, double a, double b) {
    const QuadRule& rule = gauss_legendre(15);
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    auto acc = f(mid + hw * rule.nodes[0]);
    acc *= rule.weights[0];
    for (int i = 1; i < 15; ++i) {
        auto v = f(mid + hw * rule.nodes[i]);
        v *= rule.weights[i];
        acc += v;
    }
    acc *= hw;
    return acc;
}

template <class V>
double value_maxabs(const V& v) {
    return v.maxabs();
}

inline double value_maxabs(double v) { return std::abs(v); }

template <class V, class F>
V adapt_rec(F&& f, double a, double b, const V& whole, double rel_tol, double scale,
            int depth, int depth_cap) {
    const double mid = 0.5 * (a + b);
    V left = gl15_panel(f, a, mid);
    V right = gl15_panel(f, mid, b);
    V sum = left;
    sum += right;
    V diff = sum;
    {
        V neg = whole;
        neg *= -1.0;
        diff += neg;
    }
    double err = value_maxabs(diff);
    double local_scale = std::max(value_maxabs(sum), scale);
    if (err <= rel_tol * local_scale || err == 0.0) return sum;
    if (depth >= depth_cap)
        throw QuadratureFailure("adaptive quadrature: depth cap " +
                                std::to_string(depth_cap) + " reached on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
    V lr = adapt_rec(f, a, mid, left, rel_tol, scale, depth + 1, depth_cap);
    V rr = adapt_rec(f, mid, b, right, rel_tol, scale, depth + 1, depth_cap);
    lr += rr;
    return lr;
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre integration of a value-type integrand
/// over [a, b].  The value type needs +=, *= double and maxabs() (plain
/// doubles work).  Panels use the 15-point rule and split recursively until
/// the whole-vs-halves discrepancy is below rel_tol relative to the larger
/// of the local panel value and a global scale estimate.
template <class V, class F>
V integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                     int depth_cap = 40) {
    if (a == b) {
        V z = f(a);
        z *= 0.0;
        return z;
    }
    V whole = detail::gl15_panel(f, a, b);
    double scale = detail::value_maxabs(whole);
    if (scale == 0.0) scale = 1e-300;
    return detail::adapt_rec(f, a, b, whole, rel_tol, scale, 0, depth_cap);
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F&& f, double a, double b, double rel_tol = 1e-12,
                        int depth_cap = 40) {
    return integrate_adaptive<double>([&](double x) { return f(x); }, a, b, rel_tol,
                                      depth_cap);
}

}  // namespace heatprop
