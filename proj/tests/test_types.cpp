#include <catch2/catch_amalgamated.hpp>

#include "splr/splr.hpp"
#include "test_util.hpp"

using namespace splr;

namespace {
Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("assemble_precision on the worked examples") {
  SECTION("zero factor leaves the sparse part") {
    Decomposition dec(Matrix::Identity(2, 2), Matrix::Zero(2, 1), +1);
    REQUIRE(assemble_precision(dec).isApprox(Matrix::Identity(2, 2)));
  }
  SECTION("pure outer product") {
    Matrix z(2, 1);
    z << 1, 1;
    Decomposition dec(Matrix::Zero(2, 2), z, +1);
    REQUIRE(assemble_precision(dec).isApprox(mat2(1, 1, 1, 1)));
  }
  SECTION("negative sign subtracts the factor") {
    Matrix z(2, 1);
    z << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    Decomposition dec(2.0 * Matrix::Identity(2, 2), z, -1);
    REQUIRE(assemble_precision(dec).isApprox(mat2(1.5, -0.5, -0.5, 1.5), 1e-12));
  }
}

TEST_CASE("assembled precision is exactly symmetric") {
  auto rng = testutil::stream(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + Index(rng.below(10));
    const Index r = 1 + Index(rng.below(std::uint64_t(d)));
    const int sign = rng.uniform() < 0.5 ? 1 : -1;
    Decomposition dec(testutil::random_matrix(rng, d, d),
                      testutil::random_matrix(rng, d, r), sign);
    const Matrix omega = assemble_precision(dec);
    REQUIRE((omega - omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assemble_precision is invariant to right-rotation of the factor") {
  auto rng = testutil::stream(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 3 + Index(rng.below(8));
    const Index r = 1 + Index(rng.below(3));
    const Matrix s = symmetrized(testutil::random_matrix(rng, d, d));
    const Matrix z = testutil::random_matrix(rng, d, r);
    const Matrix u = testutil::random_orthogonal(rng, r);
    Decomposition a(s, z, +1), b(s, z * u, +1);
    REQUIRE((assemble_precision(a) - assemble_precision(b))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
}

TEST_CASE("is_positive_definite") {
  REQUIRE(is_positive_definite(Matrix::Identity(3, 3)));
  REQUIRE_FALSE(is_positive_definite(mat2(1, 2, 2, 1)));  // eigenvalues 3, -1
  REQUIRE(is_positive_definite(mat2(1.5, -0.5, -0.5, 1.5)));
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(is_positive_definite(bad), InputError);
}

TEST_CASE("type invariants are enforced") {
  SECTION("dataset needs n >= 2 and d >= 2") {
    REQUIRE_THROWS_AS(Dataset(Matrix::Zero(1, 3)), InputError);
    REQUIRE_THROWS_AS(Dataset(Matrix::Zero(3, 1)), InputError);
    Matrix bad = Matrix::Zero(3, 3);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(Dataset(bad), InputError);
  }
  SECTION("covariance is symmetrized and needs a nonnegative diagonal") {
    CovarianceEstimate cov(mat2(1, 0.5, 0.1, 1));
    REQUIRE(cov.matrix()(0, 1) == Catch::Approx(0.3));
    REQUIRE(cov.matrix()(1, 0) == Catch::Approx(0.3));
    REQUIRE_THROWS_AS(CovarianceEstimate(mat2(-1, 0, 0, 1)), InputError);
  }
  SECTION("decomposition shape and sign checks") {
    REQUIRE_THROWS_AS(Decomposition(Matrix::Zero(2, 2), Matrix::Zero(3, 1), 1),
                      InputError);
    REQUIRE_THROWS_AS(Decomposition(Matrix::Zero(2, 2), Matrix::Zero(2, 3), 1),
                      InputError);
    REQUIRE_THROWS_AS(Decomposition(Matrix::Zero(2, 2), Matrix::Zero(2, 1), 2),
                      InputError);
  }
  SECTION("scalar-dimension covariance and decomposition are allowed") {
    CovarianceEstimate cov(Matrix::Constant(1, 1, 2.0));
    Decomposition dec(Matrix::Constant(1, 1, 0.5), Matrix::Zero(1, 1), +1);
    REQUIRE(objective(cov, dec) == Catch::Approx(1.0 + std::log(2.0)));
  }
}
