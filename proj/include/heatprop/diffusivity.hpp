#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "heatprop/errors.hpp"
#include "heatprop/mollifier.hpp"
#include "heatprop/quadrature.hpp"
#include "heatprop/spd.hpp"

namespace heatprop {

/// One term of a closed-form scalar expression in t.
struct ScalarTerm {
    enum class Kind { Poly, Sin, Cos, Exp };
    Kind kind = Kind::Poly;
    double coef = 0.0;
    double arg = 0.0;  // power for Poly (nonnegative integer), rate otherwise

    double value(double t) const {
        switch (kind) {
            case Kind::Poly: {
                double p = 1.0;
                for (int k = 0; k < static_cast<int>(arg); ++k) p *= t;
                return coef * p;
            }
            case Kind::Sin: return coef * std::sin(arg * t);
            case Kind::Cos: return coef * std::cos(arg * t);
            case Kind::Exp: return coef * std::exp(arg * t);
        }
        return 0.0;
    }
};

/// Sum of closed-form terms: polynomials plus sin/cos/exp with constant
/// rates.  This is the whole family the scenario grammar admits, so both
/// values and derivatives stay in closed form.
struct ScalarExpr {
    std::vector<ScalarTerm> terms;

    static ScalarExpr constant(double c) {
        ScalarExpr e;
        e.terms.push_back({ScalarTerm::Kind::Poly, c, 0.0});
        return e;
    }

    double value(double t) const {
        double s = 0.0;
        for (const auto& term : terms) s += term.value(t);
        return s;
    }

    ScalarExpr derivative() const {
        ScalarExpr d;
        for (const auto& term : terms) {
            switch (term.kind) {
                case ScalarTerm::Kind::Poly:
                    if (term.arg >= 1.0)
                        d.terms.push_back(
                            {ScalarTerm::Kind::Poly, term.coef * term.arg, term.arg - 1.0});
                    break;
                case ScalarTerm::Kind::Sin:
                    d.terms.push_back(
                        {ScalarTerm::Kind::Cos, term.coef * term.arg, term.arg});
                    break;
                case ScalarTerm::Kind::Cos:
                    d.terms.push_back(
                        {ScalarTerm::Kind::Sin, -term.coef * term.arg, term.arg});
                    break;
                case ScalarTerm::Kind::Exp:
                    d.terms.push_back(
                        {ScalarTerm::Kind::Exp, term.coef * term.arg, term.arg});
                    break;
            }
        }
        return d;
    }
};

/// Constant rotation used to conjugate diagonal parametric models.
struct Rotation {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> r{};

    static Rotation identity(int dim) {
        Rotation rot;
        rot.n = dim;
        for (int i = 0; i < dim; ++i) rot.at(i, i) = 1.0;
        return rot;
    }

    /// Planar rotation by theta in coordinates (i, j).
    static Rotation givens(int dim, int i, int j, double theta) {
        Rotation rot = identity(dim);
        const double c = std::cos(theta), s = std::sin(theta);
        rot.at(i, i) = c;
        rot.at(j, j) = c;
        rot.at(i, j) = -s;
        rot.at(j, i) = s;
        return rot;
    }

    double& at(int i, int j) { return r[static_cast<size_t>(i) * kMaxDim + j]; }
    double at(int i, int j) const { return r[static_cast<size_t>(i) * kMaxDim + j]; }

    /// this := other * this.
    void premultiply(const Rotation& other) {
        Rotation out;
        out.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += other.at(i, k) * at(k, j);
                out.at(i, j) = s;
            }
        *this = out;
    }

    bool is_orthogonal(double tol = 1e-10) const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += at(i, k) * at(j, k);
                if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
            }
        return true;
    }

    /// R * diag(d) * R^T as a symmetric matrix.
    SymMat conjugate_diag(std::span<const double> d) const {
        SymMat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += at(i, k) * d[k] * at(j, k);
                m.set(i, j, s);
            }
        return m;
    }
};

/// Time-dependent SPD diffusivity a(t) on [0, inf).  Four kinds:
///  - constant
///  - piecewise constant (right-continuous at breakpoints)
///  - smooth parametric: R diag(g_1(t), ..., g_n(t)) R^T with closed-form g_i
///  - mollified: a smooth regularization (a * psi_eps) of another model
/// Evaluation outside [0, inf) uses constant extension by the value at 0,
/// which is what the mollified kind needs near t = 0.
class DiffusivityModel {
public:
    enum class Kind { Constant, PiecewiseConstant, SmoothParametric, Mollified };

    static DiffusivityModel constant(const SpdMatrix& value) {
        DiffusivityModel m;
        m.kind_ = Kind::Constant;
        m.dim_ = value.dim();
        m.values_.push_back(value);
        return m;
    }

    static DiffusivityModel piecewise_constant(std::vector<double> breakpoints,
                                               std::vector<SpdMatrix> values) {
        if (values.empty() || values.size() != breakpoints.size() + 1)
            throw ValidationError("piecewise model needs K breakpoints and K+1 values");
        for (size_t i = 0; i < breakpoints.size(); ++i) {
            if (!(breakpoints[i] > 0.0))
                throw ValidationError("breakpoints must be positive");
            if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
                throw ValidationError("breakpoints must be strictly increasing");
        }
        const int dim = values.front().dim();
        for (const auto& v : values)
            if (v.dim() != dim) throw ValidationError("piecewise values mix dimensions");
        DiffusivityModel m;
        m.kind_ = Kind::PiecewiseConstant;
        m.dim_ = dim;
        m.breakpoints_ = std::move(breakpoints);
        m.values_ = std::move(values);
        return m;
    }

    static DiffusivityModel smooth_parametric(std::vector<ScalarExpr> diag,
                                              Rotation rotation) {
        const int dim = static_cast<int>(diag.size());
        if (dim < 1 || dim > kMaxDim)
            throw ValidationError("smooth model dimension outside 1..4");
        if (rotation.n != dim)
            throw ValidationError("rotation dimension does not match diagonal");
        if (!rotation.is_orthogonal())
            throw ValidationError("rotation matrix is not orthogonal");
        DiffusivityModel m;
        m.kind_ = Kind::SmoothParametric;
        m.dim_ = dim;
        m.diag_ = std::move(diag);
        m.rotation_ = rotation;
        return m;
    }

    static DiffusivityModel smooth_parametric(std::vector<ScalarExpr> diag) {
        const int dim = static_cast<int>(diag.size());
        return smooth_parametric(std::move(diag), Rotation::identity(dim));
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<SpdMatrix>& piece_values() const { return values_; }
    double mollification_epsilon() const { return eps_; }
    const DiffusivityModel* base_model() const { return base_.get(); }
    const MollifierSpec& mollifier() const { return psi_; }

    /// Smallest gap between consecutive breakpoints, counting 0 as a
    /// virtual breakpoint.  +inf when there are none.
    double breakpoint_clearance() const {
        const DiffusivityModel* m = kind_ == Kind::Mollified ? base_.get() : this;
        if (m->breakpoints_.empty()) return std::numeric_limits<double>::infinity();
        double gap = m->breakpoints_.front();
        for (size_t i = 1; i < m->breakpoints_.size(); ++i)
            gap = std::min(gap, m->breakpoints_[i] - m->breakpoints_[i - 1]);
        return gap;
    }

    /// a(t).  Throws NotSpd if a parametric expression leaves the SPD cone.
    SpdMatrix eval(double t) const { return SpdMatrix(eval_sym(t)); }

    /// Raw symmetric value, with constant extension below t = 0.
    SymMat eval_sym(double t) const {
        switch (kind_) {
            case Kind::Constant:
                return values_.front().sym();
            case Kind::PiecewiseConstant:
                return piece_at(t).sym();
            case Kind::SmoothParametric: {
                const double tc = std::max(t, 0.0);
                std::array<double, kMaxDim> d{};
                for (int i = 0; i < dim_; ++i) d[i] = diag_[i].value(tc);
                return rotation_.conjugate_diag({d.data(), static_cast<size_t>(dim_)});
            }
            case Kind::Mollified:
                return mollified_eval(t);
        }
        return SymMat(dim_);
    }

    /// Integral of a over [s, t] as a raw symmetric matrix (zero when
    /// s == t).  Exact for constant and piecewise-constant kinds and for
    /// mollified piecewise models; adaptive Gauss-Legendre quadrature at
    /// relative tolerance 1e-12 otherwise.
    SymMat accumulate_sym(double s, double t) const {
        if (!(s <= t)) throw ValidationError("accumulate requires s <= t");
        if (s == t) return SymMat(dim_);
        switch (kind_) {
            case Kind::Constant: {
                SymMat m = values_.front().sym();
                m *= (t - s);
                return m;
            }
            case Kind::PiecewiseConstant:
                return piecewise_integral(s, t);
            case Kind::SmoothParametric:
                return integrate_adaptive<SymMat>(
                    [this](double tau) { return eval_sym(tau); }, s, t);
            case Kind::Mollified:
                return mollified_accumulate(s, t);
        }
        return SymMat(dim_);
    }

    /// Integral of a over [s, t], validated SPD.  Requires s < t.
    SpdMatrix accumulate(double s, double t) const {
        if (!(s < t)) throw ValidationError("accumulate requires s < t for an SPD result");
        return SpdMatrix(accumulate_sym(s, t));
    }

    /// Decay budget F(t) = integral over [0, t] of lambda_min(a(tau)).
    /// Exact for constant and piecewise kinds, quadrature otherwise.
    double decay_budget(double t) const {
        if (!(t >= 0.0)) throw ValidationError("decay budget requires t >= 0");
        if (t == 0.0) return 0.0;
        switch (kind_) {
            case Kind::Constant:
                return values_.front().lambda_min() * t;
            case Kind::PiecewiseConstant: {
                double f = 0.0, cur = 0.0;
                for (size_t i = 0; i < breakpoints_.size() && cur < t; ++i) {
                    const double hi = std::min(breakpoints_[i], t);
                    if (hi > cur) f += values_[i].lambda_min() * (hi - cur);
                    cur = std::max(cur, hi);
                }
                if (t > cur) f += values_.back().lambda_min() * (t - cur);
                return f;
            }
            default:
                return integrate_scalar(
                    [this](double tau) { return eval(tau).lambda_min(); }, 0.0, t,
                    1e-12, 40);
        }
    }

    friend DiffusivityModel mollify(const DiffusivityModel& base, double eps,
                                    const MollifierSpec& psi);

private:
    DiffusivityModel() = default;

    const SpdMatrix& piece_at(double t) const {
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        return values_[static_cast<size_t>(it - breakpoints_.begin())];
    }

    /// Exact integral of a piecewise-constant model over [s, t], with the
    /// first piece extended to negative times.
    SymMat piecewise_integral(double s, double t) const {
        SymMat acc(dim_);
        double cur = s;
        for (size_t i = 0; i < breakpoints_.size() && cur < t; ++i) {
            const double hi = std::min(breakpoints_[i], t);
            if (hi > cur) {
                SymMat seg = values_[i].sym();
                seg *= (hi - cur);
                acc += seg;
                cur = hi;
            }
        }
        if (t > cur) {
            SymMat seg = values_.back().sym();
            seg *= (t - cur);
            acc += seg;
        }
        return acc;
    }

    /// (a * psi_eps)(t).  For a piecewise base this is an exact convex
    /// combination of the piece values with antiderivative weights; for a
    /// smooth base it is quadrature in the mollifier variable.
    SymMat mollified_eval(double t) const {
        const DiffusivityModel& base = *base_;
        if (base.kind_ == Kind::Constant) return base.values_.front().sym();
        if (base.kind_ == Kind::PiecewiseConstant) {
            // a_eps(t) = sum_i a_i * (Psi(hi_i) - Psi(lo_i)) where the
            // sigma-interval of piece i is [(t - end_i)/eps, (t - start_i)/eps].
            SymMat acc(dim_);
            const auto& bp = base.breakpoints_;
            for (size_t i = 0; i < base.values_.size(); ++i) {
                const double start = i == 0 ? -std::numeric_limits<double>::infinity()
                                            : bp[i - 1];
                const double end = i < bp.size() ? bp[i]
                                                 : std::numeric_limits<double>::infinity();
                const double hi = psi_.antiderivative((t - start) / eps_);
                const double lo = psi_.antiderivative((t - end) / eps_);
                const double w = hi - lo;
                if (w > 0.0) {
                    SymMat term = base.values_[i].sym();
                    term *= w;
                    acc += term;
                }
            }
            return acc;
        }
        return integrate_adaptive<SymMat>(
            [&](double sigma) {
                SymMat v = base.eval_sym(t - eps_ * sigma);
                v *= psi_.value(sigma);
                return v;
            },
            -1.0, 1.0);
    }

    SymMat mollified_accumulate(double s, double t) const {
        const DiffusivityModel& base = *base_;
        if (base.kind_ == Kind::Constant) {
            SymMat m = base.values_.front().sym();
            m *= (t - s);
            return m;
        }
        if (base.kind_ == Kind::PiecewiseConstant) {
            // Between kinks (breakpoints shifted by +-eps) the mollified
            // coefficient is a polynomial of the bump's degree plus one,
            // so a single 15-point panel per smooth span is exact.
            std::vector<double> cuts{s, t};
            for (double b : base.breakpoints_) {
                for (double c : {b - eps_, b + eps_})
                    if (c > s && c < t) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            SymMat acc(dim_);
            for (size_t i = 0; i + 1 < cuts.size(); ++i)
                acc += detail::gl15_panel(
                    [this](double tau) { return mollified_eval(tau); }, cuts[i],
                    cuts[i + 1]);
            return acc;
        }
        // Smooth base: swap integration order so the inner accumulation
        // reuses the base model's own quadrature.
        return integrate_adaptive<SymMat>(
            [&](double sigma) {
                SymMat v = base.accumulate_ext(s - eps_ * sigma, t - eps_ * sigma);
                v *= psi_.value(sigma);
                return v;
            },
            -1.0, 1.0);
    }

    /// accumulate_sym extended to intervals reaching below 0 (constant
    /// extension by the value at 0).
    SymMat accumulate_ext(double s, double t) const {
        if (s >= 0.0) return accumulate_sym(s, t);
        SymMat acc = eval_sym(0.0);
        acc *= (std::min(t, 0.0) - s);
        if (t > 0.0) acc += accumulate_sym(0.0, t);
        return acc;
    }

    Kind kind_ = Kind::Constant;
    int dim_ = 0;
    std::vector<SpdMatrix> values_;        // constant / piecewise
    std::vector<double> breakpoints_;      // piecewise
    std::vector<ScalarExpr> diag_;         // smooth parametric
    Rotation rotation_;                    // smooth parametric
    std::shared_ptr<const DiffusivityModel> base_;  // mollified
    MollifierSpec psi_{};                  // mollified
    double eps_ = 0.0;                     // mollified
};

/// Mollified model a_eps = a * psi_eps.  Accepts constant, piecewise, and
/// smooth bases; re-mollification is rejected.  For eps -> 0 the result
/// converges to the base model (exactly equal for constant bases).
inline DiffusivityModel mollify(const DiffusivityModel& base, double eps,
                                const MollifierSpec& psi) {
    if (!(eps > 0.0)) throw ValidationError("mollification scale must be positive");
    if (base.kind() == DiffusivityModel::Kind::Mollified)
        throw ValidationError("refusing to mollify an already mollified model");
    DiffusivityModel m;
    m.kind_ = DiffusivityModel::Kind::Mollified;
    m.dim_ = base.dim();
    m.base_ = std::make_shared<DiffusivityModel>(base);
    m.psi_ = psi;
    m.eps_ = eps;
    return m;
}

}  // namespace heatprop
