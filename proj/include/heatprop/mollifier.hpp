#pragma once

#include <cmath>
#include <string>

#include "heatprop/errors.hpp"
#include "heatprop/quadrature.hpp"

namespace heatprop {

/// Admissible mollifier profile: nonnegative, unit mass, support inside
/// [-1, 1].  The scaled family is psi_eps(t) = psi(t / eps) / eps.
///
/// Two polynomial bumps are provided.  Both are even, so they reproduce
/// affine functions exactly away from boundary layers:
///   quartic_bump: psi(t) = (15/16) (1 - t^2)^2
///   sextic_bump:  psi(t) = (35/32) (1 - t^2)^3
/// Closed-form antiderivatives make mollified step coefficients exact.
class MollifierSpec {
public:
    enum class Kind { QuarticBump, SexticBump };

    explicit MollifierSpec(Kind kind = Kind::QuarticBump) : kind_(kind) {
        check_admissible(*this);
    }

    static MollifierSpec parse(const std::string& name) {
        if (name == "quartic_bump") return MollifierSpec(Kind::QuarticBump);
        if (name == "sextic_bump") return MollifierSpec(Kind::SexticBump);
        throw BadMollifier("unknown mollifier '" + name + "'");
    }

    Kind kind() const { return kind_; }

    std::string name() const {
        return kind_ == Kind::QuarticBump ? "quartic_bump" : "sextic_bump";
    }

    /// psi(t); zero outside [-1, 1].
    double value(double t) const {
        if (t <= -1.0 || t >= 1.0) return 0.0;
        const double u = 1.0 - t * t;
        if (kind_ == Kind::QuarticBump) return (15.0 / 16.0) * u * u;
        return (35.0 / 32.0) * u * u * u;
    }

    /// Antiderivative Psi(t) = integral of psi over (-inf, t].
    /// Psi(-1) = 0, Psi(1) = 1.
    double antiderivative(double t) const {
        if (t <= -1.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double t3 = t * t * t;
        if (kind_ == Kind::QuarticBump) {
            const double t5 = t3 * t * t;
            return (15.0 / 16.0) * (t - (2.0 / 3.0) * t3 + 0.2 * t5 + 8.0 / 15.0);
        }
        const double t5 = t3 * t * t;
        const double t7 = t5 * t * t;
        return (35.0 / 32.0) *
               (t - t3 + 0.6 * t5 - t7 / 7.0 + 16.0 / 35.0);
    }

    friend bool operator==(const MollifierSpec& a, const MollifierSpec& b) {
        return a.kind_ == b.kind_;
    }

private:
    Kind kind_;

    /// Admissibility is checked numerically rather than trusted: unit mass
    /// within 1e-10 and nonnegativity on a sample grid.  Each profile is
    /// checked once per process.
    static void check_admissible(const MollifierSpec& psi) {
        static bool done[2] = {false, false};
        bool& flag = done[psi.kind_ == Kind::QuarticBump ? 0 : 1];
        if (flag) return;
        const double mass =
            integrate_scalar([&](double t) { return psi.value(t); }, -1.0, 1.0);
        if (std::abs(mass - 1.0) > 1e-10)
            throw BadMollifier(psi.name() + ": mass " + std::to_string(mass) +
                               " differs from 1");
        for (int i = 0; i <= 1000; ++i) {
            const double t = -1.0 + 2.0 * i / 1000.0;
            if (psi.value(t) < 0.0)
                throw BadMollifier(psi.name() + ": negative at t = " +
                                   std::to_string(t));
        }
        flag = true;
    }
};

}  // namespace heatprop
