#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>

#include "heatprop/errors.hpp"

namespace heatprop {

inline constexpr int kMaxDim = 4;

/// Small dense symmetric matrix, dimensions 1..4.  Arithmetic value type;
/// no definiteness is implied.  Entries are stored fully and kept exactly
/// symmetric by construction.
struct SymMat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    SymMat() = default;
    explicit SymMat(int dim) : n(dim) { a.fill(0.0); }

    static SymMat identity(int dim) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static SymMat scaled_identity(int dim, double s) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = s;
        return m;
    }

    double& at(int i, int j) { return a[static_cast<size_t>(i) * kMaxDim + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * kMaxDim + j]; }

    /// Set both (i,j) and (j,i).
    void set(int i, int j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }

    SymMat& operator+=(const SymMat& o) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) at(i, j) += o.at(i, j);
        return *this;
    }

    SymMat& operator*=(double s) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) at(i, j) *= s;
        return *this;
    }

    friend SymMat operator+(SymMat l, const SymMat& r) { return l += r; }
    friend SymMat operator*(double s, SymMat m) { return m *= s; }

    friend SymMat operator-(SymMat l, const SymMat& r) {
        SymMat neg = r;
        neg *= -1.0;
        return l += neg;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += at(i, i);
        return t;
    }

    double maxabs() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m = std::max(m, std::abs(at(i, j)));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += at(i, j) * at(i, j);
        return std::sqrt(s);
    }

    /// <x, M x> for x with at least n entries.
    double quad_form(std::span<const double> x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += x[i] * at(i, j) * x[j];
        return s;
    }

    /// y = M x.
    void apply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += at(i, j) * x[j];
            y[i] = s;
        }
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "[";
        for (int i = 0; i < n; ++i) {
            os << (i ? ", [" : "[");
            for (int j = 0; j < n; ++j) os << (j ? ", " : "") << at(i, j);
            os << "]";
        }
        os << "]";
        return os.str();
    }
};

namespace detail {

/// All eigenvalues of a symmetric matrix, ascending.  Closed forms for
/// n <= 2, cyclic Jacobi sweeps for n >= 3 (off-diagonal Frobenius norm
/// driven below 1e-13 relative to the matrix norm).
inline std::array<double, kMaxDim> sym_eigenvalues(const SymMat& m) {
    std::array<double, kMaxDim> ev{};
    const int n = m.n;
    if (n == 1) {
        ev[0] = m.at(0, 0);
        return ev;
    }
    if (n == 2) {
        const double mean = 0.5 * (m.at(0, 0) + m.at(1, 1));
        const double half_gap = 0.5 * (m.at(0, 0) - m.at(1, 1));
        const double rad = std::hypot(half_gap, m.at(0, 1));
        ev[0] = mean - rad;
        ev[1] = mean + rad;
        return ev;
    }
    SymMat w = m;
    const double scale = std::max(w.frobenius(), 1e-300);
    auto off = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * w.at(i, j) * w.at(i, j);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 64 && off() > 1e-13 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (w.at(q, q) - w.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double wkp = w.at(k, p), wkq = w.at(k, q);
                    w.at(k, p) = c * wkp - s * wkq;
                    w.at(k, q) = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double wpk = w.at(p, k), wqk = w.at(q, k);
                    w.at(p, k) = c * wpk - s * wqk;
                    w.at(q, k) = s * wpk + c * wqk;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) ev[i] = w.at(i, i);
    std::sort(ev.begin(), ev.begin() + n);
    return ev;
}

}  // namespace detail

/// Symmetric positive definite matrix.  Construction symmetrizes the input
/// (requiring near-symmetry), computes the spectrum, and rejects matrices
/// whose smallest eigenvalue is not safely positive: lambda_min must exceed
/// 1e-12 * trace.
class SpdMatrix {
public:
    SpdMatrix() = default;

    explicit SpdMatrix(const SymMat& m) {
        if (m.n < 1 || m.n > kMaxDim)
            throw NotSpd("dimension " + std::to_string(m.n) + " outside 1.." +
                         std::to_string(kMaxDim));
        mat_ = m;
        double asym = 0.0;
        for (int i = 0; i < m.n; ++i)
            for (int j = i + 1; j < m.n; ++j) {
                asym = std::max(asym, std::abs(m.at(i, j) - m.at(j, i)));
                const double v = 0.5 * (m.at(i, j) + m.at(j, i));
                mat_.at(i, j) = v;
                mat_.at(j, i) = v;
            }
        if (asym > 1e-10 * std::max(1.0, mat_.maxabs()))
            throw NotSpd("matrix is not symmetric: " + m.to_string());
        auto ev = detail::sym_eigenvalues(mat_);
        lambda_min_ = ev[0];
        lambda_max_ = ev[m.n - 1];
        const double tr = mat_.trace();
        if (!(tr > 0.0) || !(lambda_min_ > 1e-12 * tr))
            throw NotSpd("matrix is not positive definite (lambda_min = " +
                         std::to_string(lambda_min_) + "): " + mat_.to_string());
    }

    static SpdMatrix identity(int dim) { return SpdMatrix(SymMat::identity(dim)); }

    static SpdMatrix scaled_identity(int dim, double s) {
        return SpdMatrix(SymMat::scaled_identity(dim, s));
    }

    int dim() const { return mat_.n; }
    const SymMat& sym() const { return mat_; }
    double at(int i, int j) const { return mat_.at(i, j); }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }

    double quad_form(std::span<const double> x) const { return mat_.quad_form(x); }

    /// Cholesky factor L (lower triangular, M = L L^T).  Row-major in a
    /// SymMat container for convenience; only the lower triangle is valid.
    SymMat cholesky() const {
        const int n = mat_.n;
        SymMat l(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = mat_.at(i, j);
                for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
                if (i == j) {
                    if (!(s > 0.0))
                        throw NotSpd("Cholesky breakdown: " + mat_.to_string());
                    l.at(i, i) = std::sqrt(s);
                } else {
                    l.at(i, j) = s / l.at(j, j);
                }
            }
        }
        return l;
    }

    double determinant() const {
        SymMat l = cholesky();
        double d = 1.0;
        for (int i = 0; i < mat_.n; ++i) d *= l.at(i, i);
        return d * d;
    }

    /// Inverse, via Cholesky.  The result is again SPD.
    SpdMatrix inverse() const {
        const int n = mat_.n;
        SymMat l = cholesky();
        // Invert L in place (forward substitution per column), then
        // M^{-1} = L^{-T} L^{-1}.
        SymMat li(n);
        for (int j = 0; j < n; ++j) {
            li.at(j, j) = 1.0 / l.at(j, j);
            for (int i = j + 1; i < n; ++i) {
                double s = 0.0;
                for (int k = j; k < i; ++k) s += l.at(i, k) * li.at(k, j);
                li.at(i, j) = -s / l.at(i, i);
            }
        }
        SymMat inv(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int k = std::max(i, j); k < n; ++k)
                    s += li.at(k, i) * li.at(k, j);
                inv.set(i, j, s);
            }
        return SpdMatrix(inv);
    }

private:
    SymMat mat_{};
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
};

inline double lambda_min(const SpdMatrix& m) { return m.lambda_min(); }

/// Operator (spectral) norm; equals the largest eigenvalue for SPD input.
inline double operator_norm(const SpdMatrix& m) { return m.lambda_max(); }

}  // namespace heatprop
