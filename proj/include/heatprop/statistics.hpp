#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "heatprop/errors.hpp"

namespace heatprop {

/// Ordinary least-squares line fit with the standard error of the slope.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    int points = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || x.size() != y.size())
        throw ValidationError("line fit needs at least two matched points");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("line fit with degenerate abscissae");
    LineFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return f;
}

/// Log-log power-law fit of values against scales: values ~ C * scale^slope.
/// Zero or negative values make the law meaningless; the fit reports an
/// infinite slope when every value vanishes (exact agreement) and throws
/// otherwise.
inline LineFit fit_loglog(std::span<const double> scales,
                          std::span<const double> values) {
    bool all_zero = true;
    for (double v : values)
        if (v != 0.0) all_zero = false;
    if (all_zero) {
        LineFit f;
        f.slope = std::numeric_limits<double>::infinity();
        f.points = static_cast<int>(values.size());
        return f;
    }
    std::vector<double> lx, ly;
    lx.reserve(scales.size());
    ly.reserve(values.size());
    for (size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0) || !(values[i] > 0.0))
            throw ValidationError("log-log fit requires positive data");
        lx.push_back(std::log(scales[i]));
        ly.push_back(std::log(values[i]));
    }
    return fit_line(lx, ly);
}

}  // namespace heatprop
