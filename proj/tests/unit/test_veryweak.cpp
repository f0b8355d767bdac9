#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "heatprop/oracle.hpp"
#include "heatprop/veryweak.hpp"

using namespace heatprop;

namespace {

std::vector<double> geometric_eps(double hi, double lo, int count) {
    std::vector<double> eps(count);
    const double ratio = std::pow(lo / hi, 1.0 / (count - 1));
    for (int i = 0; i < count; ++i) eps[i] = hi * std::pow(ratio, i);
    return eps;
}

DiffusivityModel step_model() {
    return DiffusivityModel::piecewise_constant(
        {1.0},
        {SpdMatrix::scaled_identity(1, 1.0), SpdMatrix::scaled_identity(1, 3.0)});
}

Field gaussian_data(const SpatialGrid& g) {
    return field_from_gaussian(g, GaussianState{SpdMatrix::scaled_identity(1, 0.5), 1.0});
}

}  // namespace

TEST_CASE("state seminorms of a pure mode are explicit", "[veryweak]") {
    SpatialGrid g(1, 64, 5.0);
    const double w = 3.0 * std::numbers::pi / 5.0;
    Field u = sample_field(g, [&](std::span<const double> x) { return std::sin(w * x[0]); });
    CHECK(state_seminorm(u, SeminormKind::SupL2) ==
          Catch::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(state_seminorm(u, SeminormKind::SupH1) ==
          Catch::Approx(w * std::sqrt(5.0)).epsilon(1e-12));
    CHECK(seminorm_name(SeminormKind::SupL2) == "sup_t_l2");
    CHECK(seminorm_name(SeminormKind::SupH1) == "sup_t_h1");
}

TEST_CASE("default width grid is geometric and strictly decreasing", "[veryweak]") {
    auto eps = default_epsilon_grid();
    REQUIRE(eps.size() == 13);
    CHECK(eps.front() == Catch::Approx(1e-1).epsilon(1e-12));
    CHECK(eps.back() == Catch::Approx(1e-4).epsilon(1e-12));
    for (size_t i = 1; i < eps.size(); ++i) CHECK(eps[i] < eps[i - 1]);
}

TEST_CASE("nets validate their width lists", "[veryweak]") {
    MollifierSpec psi(MollifierSpec::Kind::QuarticBump);
    auto base = step_model();
    CHECK_THROWS_AS(EpsNet({}, base, psi), ValidationError);
    CHECK_THROWS_AS(EpsNet({0.1, 0.1}, base, psi), ValidationError);
    CHECK_THROWS_AS(EpsNet({0.01, 0.1}, base, psi), ValidationError);
    CHECK_THROWS_AS(EpsNet({0.1, -0.01}, base, psi), ValidationError);
    CHECK_THROWS_AS(EpsNet({0.5}, base, psi), ValidationError);
    EpsNet net({0.25, 0.1}, base, psi);
    CHECK(net.model_at(0.1).kind() == DiffusivityModel::Kind::Mollified);
}

TEST_CASE("step nets are moderate of order zero", "[veryweak]") {
    SpatialGrid g(1, 128, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0, 1.5};
    auto eps = geometric_eps(1e-1, 1e-3, 9);
    EpsNet net(eps, step_model(), MollifierSpec(MollifierSpec::Kind::QuarticBump));
    auto sols = solve_net(net, u0, times);
    auto diag = moderateness_diagnostic(
        eps, sols, {SeminormKind::SupL2, SeminormKind::SupH1});
    CHECK(diag.kind == "moderateness");
    CHECK(diag.verdict == "moderate");
    CHECK(diag.moderateness_order == 0);
    REQUIRE(diag.fits.size() == 2);
    for (const auto& f : diag.fits) {
        CHECK(std::abs(f.slope) < 0.05);
        CHECK(f.stderr_ < kVerdictMaxStderr);
        CHECK(f.points == 9);
    }
}

TEST_CASE("threaded net solves match the serial ones exactly", "[veryweak]") {
    SpatialGrid g(1, 128, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0};
    auto eps = geometric_eps(1e-1, 1e-2, 6);
    EpsNet net(eps, step_model(), MollifierSpec(MollifierSpec::Kind::QuarticBump));
    auto serial = solve_net(net, u0, times, {}, 16, 1);
    auto threaded = solve_net(net, u0, times, {}, 16, 3);
    REQUIRE(serial.size() == threaded.size());
    for (size_t i = 0; i < serial.size(); ++i)
        for (size_t j = 0; j < serial[i].states.size(); ++j)
            CHECK(serial[i].states[j].values == threaded[i].states[j].values);
}

TEST_CASE("a net compared with itself is negligible with exact zeros", "[veryweak]") {
    SpatialGrid g(1, 128, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0, 1.5};
    auto eps = geometric_eps(1e-1, 1e-3, 9);
    EpsNet net(eps, step_model(), MollifierSpec(MollifierSpec::Kind::QuarticBump));
    auto sols = solve_net(net, u0, times);
    auto diag = negligibility_diagnostic(
        eps, sols, sols, {SeminormKind::SupL2, SeminormKind::SupH1});
    CHECK(diag.verdict == "negligible");
    CHECK(std::isinf(diag.fits[0].slope));
    for (const auto& col : diag.values)
        for (double v : col) CHECK(v == 0.0);
}

TEST_CASE("bump choice does not matter on a jump-free base", "[veryweak]") {
    SpatialGrid g(1, 128, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0};
    auto eps = geometric_eps(1e-1, 1e-2, 6);
    auto base = DiffusivityModel::constant(SpdMatrix::scaled_identity(1, 1.3));
    EpsNet a(eps, base, MollifierSpec(MollifierSpec::Kind::QuarticBump));
    EpsNet b(eps, base, MollifierSpec(MollifierSpec::Kind::SexticBump));
    auto diag = negligibility_diagnostic(eps, solve_net(a, u0, times),
                                         solve_net(b, u0, times),
                                         {SeminormKind::SupL2});
    CHECK(diag.verdict == "negligible");
}

TEST_CASE("paired bump nets across a jump differ negligibly", "[veryweak]") {
    SpatialGrid g(1, 256, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0, 1.5};
    auto eps = geometric_eps(1e-1, 1e-3, 9);
    EpsNet a(eps, step_model(), MollifierSpec(MollifierSpec::Kind::QuarticBump));
    EpsNet b(eps, step_model(), MollifierSpec(MollifierSpec::Kind::SexticBump));
    auto diag = negligibility_diagnostic(
        eps, solve_net(a, u0, times), solve_net(b, u0, times),
        {SeminormKind::SupL2, SeminormKind::SupH1});
    CHECK(diag.verdict == "negligible");
    for (const auto& f : diag.fits) {
        CHECK(f.slope > 0.9);
        CHECK(f.slope < 1.1);
        CHECK(f.stderr_ < kVerdictMaxStderr);
    }
}

TEST_CASE("net members converge to the unregularized solution", "[veryweak]") {
    SpatialGrid g(1, 256, 16.0);
    Field u0 = gaussian_data(g);
    std::vector<double> times{0.5, 1.0, 1.5};
    auto eps = geometric_eps(1e-1, 1e-3, 9);

    SECTION("first order across a jump") {
        auto base = step_model();
        EpsNet net(eps, base, MollifierSpec(MollifierSpec::Kind::QuarticBump));
        Trajectory ref = solve_homogeneous(u0, base, times);
        auto diag = consistency_check(eps, solve_net(net, u0, times), ref);
        CHECK(diag.kind == "consistency");
        CHECK(diag.verdict == "consistent");
        CHECK(diag.fits[0].slope > 0.9);
        CHECK(diag.fits[0].slope < 1.1);
    }

    SECTION("second order on a smooth base") {
        std::vector<ScalarExpr> diag_expr(1);
        diag_expr[0].terms.push_back({ScalarTerm::Kind::Poly, 1.5, 0.0});
        diag_expr[0].terms.push_back({ScalarTerm::Kind::Sin, 0.5, 2.0});
        auto base = DiffusivityModel::smooth_parametric(diag_expr);
        EpsNet net(eps, base, MollifierSpec(MollifierSpec::Kind::QuarticBump));
        Trajectory ref = solve_homogeneous(u0, base, times);
        auto diag = consistency_check(eps, solve_net(net, u0, times), ref);
        CHECK(diag.verdict == "consistent");
        CHECK(diag.fits[0].slope > 1.7);
        CHECK(diag.fits[0].slope < 2.3);
    }
}

TEST_CASE("mismatched nets are rejected", "[veryweak]") {
    SpatialGrid g(1, 64, 16.0);
    Field u0 = gaussian_data(g);
    auto eps = geometric_eps(1e-1, 1e-2, 6);
    EpsNet net(eps, step_model(), MollifierSpec(MollifierSpec::Kind::QuarticBump));
    auto sols = solve_net(net, u0, {0.5, 1.5});
    auto other = solve_net(net, u0, {0.5, 1.0});
    std::vector<double> short_eps(eps.begin(), eps.end() - 1);
    CHECK_THROWS_AS(
        moderateness_diagnostic(short_eps, sols, {SeminormKind::SupL2}),
        MismatchedNets);
    CHECK_THROWS_AS(
        negligibility_diagnostic(eps, sols, other, {SeminormKind::SupL2}),
        MismatchedNets);
    Trajectory ref = solve_homogeneous(u0, step_model(), {0.5, 1.0});
    CHECK_THROWS_AS(consistency_check(eps, sols, ref), MismatchedNets);
}
