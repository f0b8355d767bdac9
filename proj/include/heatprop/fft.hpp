#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace heatprop {

/// In-place radix-2 Cooley-Tukey transform.  n must be a power of two.
/// Forward uses exp(-i 2 pi j k / n) and no scaling; the inverse applies
/// the 1/n factor.  Twiddles come from one direct std::polar table per
/// call, so rounding does not accumulate along recurrences.
inline void fft_inplace(std::complex<double>* data, size_t n, bool inverse) {
    if (n < 2) return;
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    std::vector<std::complex<double>> tw(n / 2);
    const double sign = inverse ? 1.0 : -1.0;
    for (size_t j = 0; j < n / 2; ++j)
        tw[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                    static_cast<double>(j) / static_cast<double>(n));
    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t start = 0; start < n; start += len) {
            for (size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = data[start + j];
                std::complex<double> v = data[start + j + len / 2] * tw[j * stride];
                data[start + j] = u + v;
                data[start + j + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) data[i] *= scale;
    }
}

/// Transform each axis of a dense row-major array of extent `extent` along
/// every one of `ndim` axes (last axis contiguous).
inline void fft_nd(std::vector<std::complex<double>>& data, size_t extent, int ndim,
                   bool inverse) {
    size_t total = 1;
    for (int d = 0; d < ndim; ++d) total *= extent;
    std::vector<std::complex<double>> line(extent);
    size_t stride = 1;
    for (int axis = ndim - 1; axis >= 0; --axis) {
        const size_t block = stride * extent;
        for (size_t base = 0; base < total; base += block) {
            for (size_t off = 0; off < stride; ++off) {
                for (size_t k = 0; k < extent; ++k)
                    line[k] = data[base + off + k * stride];
                fft_inplace(line.data(), extent, inverse);
                for (size_t k = 0; k < extent; ++k)
                    data[base + off + k * stride] = line[k];
            }
        }
        stride *= extent;
    }
}

}  // namespace heatprop
