#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "heatprop/diffusivity.hpp"

using namespace heatprop;

namespace {

DiffusivityModel step_model(double left, double right, double at) {
    return DiffusivityModel::piecewise_constant(
        {at}, {SpdMatrix::scaled_identity(1, left), SpdMatrix::scaled_identity(1, right)});
}

}  // namespace

TEST_CASE("constant model accumulates linearly", "[diffusivity]") {
    auto m = DiffusivityModel::constant(SpdMatrix::scaled_identity(2, 1.5));
    CHECK(m.eval(0.3).at(0, 0) == 1.5);
    CHECK(m.accumulate(0.25, 2.0).at(0, 0) == Catch::Approx(1.5 * 1.75).epsilon(1e-15));
    CHECK(m.accumulate(0.25, 2.0).at(0, 1) == 0.0);
    CHECK(m.decay_budget(2.0) == Catch::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("piecewise model integrates piece by piece", "[diffusivity]") {
    auto m = step_model(1.0, 3.0, 1.0);
    CHECK(m.eval(0.5).at(0, 0) == 1.0);
    CHECK(m.eval(1.0).at(0, 0) == 3.0);  // right-continuous at the breakpoint
    CHECK(m.eval_sym(-0.5).at(0, 0) == 1.0);
    CHECK(m.accumulate(0.0, 2.0).at(0, 0) == Catch::Approx(4.0).epsilon(1e-15));
    CHECK(m.accumulate(0.5, 1.5).at(0, 0) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(m.decay_budget(2.0) == Catch::Approx(4.0).epsilon(1e-15));
    CHECK(m.breakpoint_clearance() == Catch::Approx(1.0));

    auto two = DiffusivityModel::piecewise_constant(
        {0.5, 2.0},
        {SpdMatrix::scaled_identity(1, 1.0), SpdMatrix::scaled_identity(1, 2.0),
         SpdMatrix::scaled_identity(1, 4.0)});
    CHECK(two.breakpoint_clearance() == Catch::Approx(0.5));
    CHECK(two.accumulate(0.0, 3.0).at(0, 0) == Catch::Approx(0.5 + 3.0 + 4.0));
}

TEST_CASE("piecewise validation rejects malformed input", "[diffusivity][errors]") {
    std::vector<SpdMatrix> vals{SpdMatrix::identity(1), SpdMatrix::identity(1)};
    CHECK_THROWS_AS(DiffusivityModel::piecewise_constant({-1.0}, vals), ValidationError);
    CHECK_THROWS_AS(DiffusivityModel::piecewise_constant({2.0, 1.0},
                                                         {SpdMatrix::identity(1),
                                                          SpdMatrix::identity(1),
                                                          SpdMatrix::identity(1)}),
                    ValidationError);
    CHECK_THROWS_AS(DiffusivityModel::piecewise_constant({1.0}, {SpdMatrix::identity(1)}),
                    ValidationError);
    CHECK_THROWS_AS(
        DiffusivityModel::piecewise_constant({1.0}, {SpdMatrix::identity(1),
                                                     SpdMatrix::identity(2)}),
        ValidationError);
}

TEST_CASE("smooth rotated model matches its antiderivative", "[diffusivity]") {
    // a(t) = R diag(1, 1 + sin t) R^T has antiderivative R diag(t, t + 1 - cos t) R^T.
    const double theta = 0.6;
    Rotation rot = Rotation::givens(2, 0, 1, theta);
    std::vector<ScalarExpr> diag(2);
    diag[0] = ScalarExpr::constant(1.0);
    diag[1].terms.push_back({ScalarTerm::Kind::Poly, 1.0, 0.0});
    diag[1].terms.push_back({ScalarTerm::Kind::Sin, 1.0, 1.0});
    auto m = DiffusivityModel::smooth_parametric(diag, rot);

    for (double t : {0.4, 1.3, 2.7}) {
        const double c = std::cos(theta), s = std::sin(theta);
        const double d0 = t, d1 = t + 1.0 - std::cos(t);
        double want[2][2] = {{c * c * d0 + s * s * d1, c * s * (d0 - d1)},
                             {c * s * (d0 - d1), s * s * d0 + c * c * d1}};
        SymMat got = m.accumulate_sym(0.0, t);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(got.at(i, j) == Catch::Approx(want[i][j]).margin(1e-12));
    }
    CHECK(m.eval(0.0).at(1, 1) == Catch::Approx(std::sin(theta) * std::sin(theta) +
                                                std::cos(theta) * std::cos(theta)));
}

TEST_CASE("rotations are orthogonal and compose", "[diffusivity]") {
    Rotation r = Rotation::givens(3, 0, 2, 0.8);
    r.premultiply(Rotation::givens(3, 1, 2, -0.3));
    CHECK(r.is_orthogonal(1e-12));
    SymMat conj = r.conjugate_diag(std::vector<double>{1.0, 2.0, 3.0});
    auto ev = detail::sym_eigenvalues(conj);
    CHECK(ev[0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(ev[2] == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("mollified step agrees with the step away from the kink", "[diffusivity]") {
    auto base = step_model(1.0, 3.0, 1.0);
    for (auto kind : {MollifierSpec::Kind::QuarticBump, MollifierSpec::Kind::SexticBump}) {
        auto mol = mollify(base, 0.25, MollifierSpec(kind));
        CHECK(mol.eval(0.5).at(0, 0) == Catch::Approx(1.0).margin(1e-15));
        CHECK(mol.eval(1.5).at(0, 0) == Catch::Approx(3.0).margin(1e-15));
        // At the breakpoint the smoothed coefficient is the two-sided average.
        CHECK(mol.eval(1.0).at(0, 0) == Catch::Approx(2.0).epsilon(1e-14));
        // The antiderivatives agree exactly once the kink window has closed.
        CHECK(mol.accumulate_sym(0.0, 1.25).at(0, 0) ==
              Catch::Approx(base.accumulate_sym(0.0, 1.25).at(0, 0)).epsilon(1e-14));
        CHECK(mol.accumulate_sym(0.0, 2.0).at(0, 0) ==
              Catch::Approx(4.0).epsilon(1e-14));
    }
}

TEST_CASE("mollified step antiderivative shift at the breakpoint", "[diffusivity]") {
    // Inside the window the smoothed antiderivative leads the step's by
    // (right - left) * eps * integral of the cumulative mollifier over [-1,0].
    auto base = step_model(1.0, 3.0, 1.0);
    const double eps = 0.2;
    const double quartic_lead = 5.0 / 32.0;
    const double sextic_lead = 35.0 / 256.0;
    {
        auto mol = mollify(base, eps, MollifierSpec(MollifierSpec::Kind::QuarticBump));
        const double diff = mol.accumulate_sym(0.0, 1.0).at(0, 0) - 1.0;
        CHECK(diff == Catch::Approx(2.0 * eps * quartic_lead).epsilon(1e-13));
    }
    {
        auto mol = mollify(base, eps, MollifierSpec(MollifierSpec::Kind::SexticBump));
        const double diff = mol.accumulate_sym(0.0, 1.0).at(0, 0) - 1.0;
        CHECK(diff == Catch::Approx(2.0 * eps * sextic_lead).epsilon(1e-13));
    }
}

TEST_CASE("mollifying a constant changes nothing", "[diffusivity]") {
    auto base = DiffusivityModel::constant(SpdMatrix::scaled_identity(2, 1.7));
    auto mol = mollify(base, 0.1, MollifierSpec(MollifierSpec::Kind::QuarticBump));
    CHECK(mol.eval(0.02).at(0, 0) == Catch::Approx(1.7).epsilon(1e-14));
    CHECK(mol.accumulate_sym(0.0, 1.0).at(0, 0) == Catch::Approx(1.7).epsilon(1e-13));
}

TEST_CASE("mollified smooth model converges at second order", "[diffusivity]") {
    std::vector<ScalarExpr> diag(1);
    diag[0].terms.push_back({ScalarTerm::Kind::Poly, 1.5, 0.0});
    diag[0].terms.push_back({ScalarTerm::Kind::Sin, 0.5, 2.0});
    auto base = DiffusivityModel::smooth_parametric(diag);
    const double t = 1.2;
    const double exact = base.accumulate_sym(0.0, t).at(0, 0);
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
        auto mol = mollify(base, eps, MollifierSpec(MollifierSpec::Kind::QuarticBump));
        const double err = std::abs(mol.accumulate_sym(0.0, t).at(0, 0) - exact);
        if (prev > 0.0) {
            const double rate = prev / err;
            CHECK(rate > 3.0);
            CHECK(rate < 5.0);
        }
        prev = err;
    }
}

TEST_CASE("mollify validates its arguments", "[diffusivity][errors]") {
    auto base = step_model(1.0, 3.0, 1.0);
    CHECK_THROWS_AS(mollify(base, 0.0, MollifierSpec()), ValidationError);
    CHECK_THROWS_AS(mollify(base, -0.1, MollifierSpec()), ValidationError);
    auto once = mollify(base, 0.1, MollifierSpec());
    CHECK_THROWS_AS(mollify(once, 0.05, MollifierSpec()), ValidationError);
}

TEST_CASE("accumulate requires an ordered interval", "[diffusivity][errors]") {
    auto m = DiffusivityModel::constant(SpdMatrix::identity(1));
    CHECK_THROWS_AS(m.accumulate(1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(m.accumulate(1.0, 1.0), ValidationError);
    CHECK(m.accumulate_sym(1.0, 1.0).at(0, 0) == 0.0);
}
