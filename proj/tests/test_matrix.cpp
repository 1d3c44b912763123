#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "riskattr/matrix.hpp"

using namespace riskattr;

TEST_CASE("matrix shape and access", "[matrix]") {
    Matrix m(2, 3);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    m(1, 2) = 5.0;
    REQUIRE(m(1, 2) == 5.0);
    REQUIRE(m(0, 0) == 0.0);
    REQUIRE(m.all_finite());
    m(0, 1) = std::nan("");
    REQUIRE_FALSE(m.all_finite());
}

TEST_CASE("identity and row span", "[matrix]") {
    const Matrix id = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) REQUIRE(id(i, j) == (i == j ? 1.0 : 0.0));
    const auto row = id.row(1);
    REQUIRE(row.size() == 3);
    REQUIRE(row[1] == 1.0);
}

TEST_CASE("symmetry detection", "[matrix]") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    m(0, 1) = 0.5;
    m(1, 0) = 0.5;
    REQUIRE(is_symmetric(m, 0.0));
    m(1, 0) = 0.5 + 1e-6;
    REQUIRE_FALSE(is_symmetric(m, 1e-9));
    REQUIRE(is_symmetric(m, 1e-3));
}

TEST_CASE("population covariance with exact sample moments", "[matrix]") {
    // columns (3,-3,3,-3) and (4,4,-4,-4): variances 9 and 16, covariance 0
    Matrix data(4, 2);
    const double col1[4] = {3.0, -3.0, 3.0, -3.0};
    const double col2[4] = {4.0, 4.0, -4.0, -4.0};
    for (std::size_t t = 0; t < 4; ++t) {
        data(t, 0) = col1[t];
        data(t, 1) = col2[t];
    }
    const Matrix cov = covariance(data);
    REQUIRE(cov(0, 0) == 9.0);
    REQUIRE(cov(1, 1) == 16.0);
    REQUIRE(cov(0, 1) == 0.0);
    REQUIRE(cov(1, 0) == 0.0);

    const Matrix bessel = covariance(data, true);
    REQUIRE(bessel(0, 0) == 12.0);
    REQUIRE(bessel(1, 1) == Catch::Approx(64.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("jacobi eigenvalues of a known matrix", "[matrix]") {
    // [[2,1],[1,2]] has eigenvalues 1 and 3
    Matrix m(2, 2);
    m(0, 0) = 2.0;
    m(1, 1) = 2.0;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    const auto eig = symmetric_eigenvalues(m);
    REQUIRE(eig.size() == 2);
    REQUIRE(eig[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(eig[1] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("jacobi eigenvalues sum to the trace", "[matrix]") {
    // random-ish symmetric 5x5 with fixed entries
    Matrix m(5, 5);
    double v = 0.1;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i; j < 5; ++j) {
            v = std::fmod(v * 7.3 + 0.17, 1.9) - 0.5;
            m(i, j) = v;
            m(j, i) = v;
        }
    const auto eig = symmetric_eigenvalues(m);
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) trace += m(i, i);
    for (double e : eig) sum += e;
    REQUIRE(sum == Catch::Approx(trace).margin(1e-10));
    for (std::size_t i = 1; i < eig.size(); ++i) REQUIRE(eig[i - 1] <= eig[i]);
}

TEST_CASE("dot product over spans", "[matrix]") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{4.0, 5.0, 6.0};
    REQUIRE(dot(std::span<const double>(a), std::span<const double>(b)) == 32.0);
}
