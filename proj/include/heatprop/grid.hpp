#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "heatprop/errors.hpp"

namespace heatprop {

/// Warning flags carried by fields through propagator applications.
/// Advisory, never fatal.
enum FieldFlags : std::uint32_t {
    /// Nyquist symbol above 0.5 while the input holds visible energy in the
    /// top octave of modes: the grid cannot resolve the dissipative scale.
    kGridTooCoarse = 1u << 0,
    /// sqrt(lambda_max(Sigma)) exceeded L / 8 during an application; the
    /// periodic box is too small for the spread kernel.
    kDomainTruncation = 1u << 1,
};

/// Uniform periodic grid on [-L, L)^dim with N samples per axis.
/// N must be a power of two; dim is 1, 2, or 3.
struct SpatialGrid {
    int dim = 1;
    std::int64_t n = 0;
    double half_width = 0.0;

    SpatialGrid() = default;
    SpatialGrid(int dim_, std::int64_t n_, double half_width_)
        : dim(dim_), n(n_), half_width(half_width_) {
        if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1..3");
        if (n < 2 || (n & (n - 1)) != 0)
            throw ValidationError("grid size must be a power of two >= 2");
        if (!(half_width > 0.0)) throw ValidationError("grid half-width must be positive");
    }

    double spacing() const { return 2.0 * half_width / static_cast<double>(n); }

    std::size_t total_points() const {
        std::size_t t = 1;
        for (int d = 0; d < dim; ++d) t *= static_cast<std::size_t>(n);
        return t;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= spacing();
        return v;
    }

    /// Coordinate of index i along one axis.
    double coord(std::int64_t i) const {
        return -half_width + spacing() * static_cast<double>(i);
    }

    /// Frequency of FFT bin k along one axis (bins above n/2 wrap negative).
    double frequency(std::int64_t k) const {
        const std::int64_t signed_k = k < n / 2 ? k : k - n;
        return static_cast<double>(signed_k) * std::numbers::pi / half_width;
    }

    double nyquist_frequency() const {
        return static_cast<double>(n / 2) * std::numbers::pi / half_width;
    }

    /// Decompose a flat row-major index into per-axis indices.
    std::array<std::int64_t, 3> unflatten(std::size_t flat) const {
        std::array<std::int64_t, 3> idx{};
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
        }
        return idx;
    }

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.dim == b.dim && a.n == b.n && a.half_width == b.half_width;
    }
};

/// Real scalar field sampled on a grid, row-major (last axis fastest).
struct Field {
    SpatialGrid grid;
    std::vector<double> values;
    std::uint32_t flags = 0;

    Field() = default;
    explicit Field(const SpatialGrid& g) : grid(g), values(g.total_points(), 0.0) {}

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// Riemann mass: cell volume times the sample sum.
    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.cell_volume();
    }
};

/// Fill a field by evaluating f at every grid point.
template <class F>
Field sample_field(const SpatialGrid& grid, F&& f) {
    Field out(grid);
    const std::size_t total = grid.total_points();
    std::array<double, 3> x{};
    for (std::size_t flat = 0; flat < total; ++flat) {
        const auto idx = grid.unflatten(flat);
        for (int d = 0; d < grid.dim; ++d) x[d] = grid.coord(idx[d]);
        out.values[flat] = f(std::span<const double>{x.data(),
                                                     static_cast<size_t>(grid.dim)});
    }
    return out;
}

namespace detail {

inline void append_u64_le(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void append_f64_le(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    append_u64_le(buf, bits);
}

inline std::uint64_t read_u64_le(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

inline double read_f64_le(const char* p) {
    const std::uint64_t bits = read_u64_le(p);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

/// Write a whole file atomically: stage to <path>.tmp, then rename.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ValidationError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Serialize a field to the binary format: header of three little-endian
/// 64-bit words (dim, N, L with L as an IEEE double), then the samples as
/// row-major little-endian doubles.
inline std::string field_to_bytes(const Field& f) {
    std::string buf;
    buf.reserve(24 + 8 * f.values.size());
    detail::append_u64_le(buf, static_cast<std::uint64_t>(f.grid.dim));
    detail::append_u64_le(buf, static_cast<std::uint64_t>(f.grid.n));
    detail::append_f64_le(buf, f.grid.half_width);
    for (double v : f.values) detail::append_f64_le(buf, v);
    return buf;
}

inline Field field_from_bytes(const std::string& buf) {
    if (buf.size() < 24) throw ParseError("field blob shorter than its header");
    const auto dim = static_cast<int>(detail::read_u64_le(buf.data()));
    const auto n = static_cast<std::int64_t>(detail::read_u64_le(buf.data() + 8));
    const double half_width = detail::read_f64_le(buf.data() + 16);
    SpatialGrid grid(dim, n, half_width);
    const std::size_t total = grid.total_points();
    if (buf.size() != 24 + 8 * total)
        throw ParseError("field blob payload size does not match its header");
    Field f(grid);
    for (std::size_t i = 0; i < total; ++i)
        f.values[i] = detail::read_f64_le(buf.data() + 24 + 8 * i);
    return f;
}

inline void write_field(const std::filesystem::path& path, const Field& f) {
    detail::write_file_atomic(path, field_to_bytes(f));
}

inline Field read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open field file " + path.string());
    std::string buf((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
    return field_from_bytes(buf);
}

/// Plotting-friendly CSV: per-axis indices, coordinates, and the value.
inline std::string field_to_csv(const Field& f) {
    std::string out;
    const char* axis_names[3] = {"x", "y", "z"};
    for (int d = 0; d < f.grid.dim; ++d) out += "i" + std::to_string(d) + ",";
    for (int d = 0; d < f.grid.dim; ++d) {
        out += axis_names[d];
        out += ",";
    }
    out += "value\n";
    char num[64];
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        const auto idx = f.grid.unflatten(flat);
        for (int d = 0; d < f.grid.dim; ++d)
            out += std::to_string(idx[d]) + ",";
        for (int d = 0; d < f.grid.dim; ++d) {
            std::snprintf(num, sizeof num, "%.17g,", f.grid.coord(idx[d]));
            out += num;
        }
        std::snprintf(num, sizeof num, "%.17g\n", f.values[flat]);
        out += num;
    }
    return out;
}

}  // namespace heatprop
