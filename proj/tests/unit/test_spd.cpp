#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heatprop/spd.hpp"

using namespace heatprop;

TEST_CASE("two by two eigenvalues match the closed form", "[spd]") {
    SymMat m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 2.0);
    m.set(0, 1, 1.0);
    SpdMatrix a(m);
    CHECK(a.lambda_min() == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(a.lambda_max() == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(a.determinant() == Catch::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("jacobi eigenvalues recover a conjugated diagonal", "[spd]") {
    // R diag(1,2,3) R^T for a product of plane rotations; spectrum must
    // come back as {1,2,3}.
    const double c1 = std::cos(0.7), s1 = std::sin(0.7);
    const double c2 = std::cos(-0.4), s2 = std::sin(-0.4);
    double r[3][3] = {{c1, -s1, 0.0}, {s1, c1, 0.0}, {0.0, 0.0, 1.0}};
    double r2[3][3] = {{1.0, 0.0, 0.0}, {0.0, c2, -s2}, {0.0, s2, c2}};
    double rot[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) rot[i][j] += r2[i][k] * r[k][j];
    const double d[3] = {1.0, 2.0, 3.0};
    SymMat m(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k) v += rot[i][k] * d[k] * rot[j][k];
            m.at(i, j) = v;
        }
    SpdMatrix a(m);
    auto ev = detail::sym_eigenvalues(a.sym());
    CHECK(ev[0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(ev[2] == Catch::Approx(3.0).epsilon(1e-12));
    CHECK(a.determinant() == Catch::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("cholesky factor reproduces the matrix", "[spd]") {
    SymMat m(3);
    m.set(0, 0, 4.0);
    m.set(1, 1, 5.0);
    m.set(2, 2, 6.0);
    m.set(0, 1, 1.0);
    m.set(0, 2, 0.5);
    m.set(1, 2, -0.7);
    SpdMatrix a(m);
    SymMat l = a.cholesky();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k)
                v += (k <= i ? l.at(i, k) : 0.0) * (k <= j ? l.at(j, k) : 0.0);
            CHECK(v == Catch::Approx(m.at(i, j)).margin(1e-13));
        }
}

TEST_CASE("inverse times matrix gives the identity", "[spd]") {
    SymMat m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 2.0);
    m.set(0, 1, 1.0);
    SpdMatrix a(m);
    SpdMatrix inv = a.inverse();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double v = 0.0;
            for (int k = 0; k < 2; ++k) v += a.at(i, k) * inv.at(k, j);
            CHECK(v == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-13));
        }
}

TEST_CASE("quadratic form matches direct evaluation", "[spd]") {
    SymMat m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 2.0);
    m.set(0, 1, 1.0);
    SpdMatrix a(m);
    const std::vector<double> x{1.0, 1.0};
    CHECK(a.quad_form(x) == Catch::Approx(6.0).epsilon(1e-15));
    CHECK(operator_norm(a) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(lambda_min(a) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("indefinite and degenerate matrices are rejected", "[spd][errors]") {
    SymMat bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, 1.0);
    bad.set(0, 1, 2.0);
    CHECK_THROWS_AS(SpdMatrix(bad), NotSpd);

    SymMat zero(2);
    CHECK_THROWS_AS(SpdMatrix(zero), NotSpd);

    SymMat asym(2);
    asym.at(0, 0) = 1.0;
    asym.at(1, 1) = 1.0;
    asym.at(0, 1) = 0.3;
    asym.at(1, 0) = -0.3;
    CHECK_THROWS_AS(SpdMatrix(asym), NotSpd);

    try {
        SpdMatrix b(bad);
        FAIL("expected rejection");
    } catch (const NotSpd& e) {
        CHECK(e.code() == "NotSpd");
    }
}
