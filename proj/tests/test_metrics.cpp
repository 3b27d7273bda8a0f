#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "splr/splr.hpp"
#include "test_util.hpp"

using namespace splr;

namespace {

// Brute-force Procrustes for r in {1, 2}: scan the orthogonal group directly.
double brute_force_distance(const Matrix& z, const Matrix& z_ref,
                            double angular_step = 1e-3) {
  const Index r = z.cols();
  double best = std::numeric_limits<double>::infinity();
  if (r == 1) {
    best = std::min((z - z_ref).norm(), (z + z_ref).norm());
  } else {
    for (double theta = 0.0; theta < 2.0 * std::numbers::pi;
         theta += angular_step) {
      const double c = std::cos(theta), s = std::sin(theta);
      Matrix rot(2, 2), refl(2, 2);
      rot << c, -s, s, c;
      refl << c, s, s, -c;
      best = std::min({best, (z - z_ref * rot).norm(),
                       (z - z_ref * refl).norm()});
    }
  }
  return best;
}

}  // namespace

TEST_CASE("frobenius_error") {
  REQUIRE(frobenius_error(Matrix::Identity(3, 3), Matrix::Identity(3, 3)) == 0.0);
  REQUIRE(frobenius_error(Matrix::Identity(2, 2), Matrix::Zero(2, 2)) ==
          Catch::Approx(std::sqrt(2.0)));
  Matrix a(1, 2), b(1, 2);
  a << 3, 4;
  b << 0, 0;
  REQUIRE(frobenius_error(a, b) == Catch::Approx(5.0));
  REQUIRE_THROWS_AS(frobenius_error(Matrix::Zero(2, 2), Matrix::Zero(3, 3)),
                    InputError);
}

TEST_CASE("procrustes_distance basics") {
  auto rng = testutil::stream(30);
  const Matrix z = testutil::random_matrix(rng, 6, 2);
  REQUIRE(procrustes_distance(z, z) == Catch::Approx(0.0).margin(1e-9));

  Matrix z1 = testutil::random_matrix(rng, 5, 1);
  REQUIRE(procrustes_distance(Matrix(-z1), z1) == Catch::Approx(0.0).margin(1e-9));

  Matrix e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  REQUIRE(procrustes_distance(e1, e2) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("procrustes_distance is rotation invariant") {
  auto rng = testutil::stream(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 3 + Index(rng.below(10));
    const Index r = 1 + Index(rng.below(3));
    const Matrix z = testutil::random_matrix(rng, d, r);
    const Matrix z_ref = testutil::random_matrix(rng, d, r);
    const Matrix u = testutil::random_orthogonal(rng, r);
    REQUIRE(std::abs(procrustes_distance(z * u, z_ref) -
                     procrustes_distance(z, z_ref)) < 1e-9);
  }
}

TEST_CASE("closed form matches the brute-force oracle for r = 1, 2") {
  auto rng = testutil::stream(32);
  for (int trial = 0; trial < 40; ++trial) {
    const Index r = 1 + Index(rng.below(2));
    const Index d = r + 2 + Index(rng.below(8));
    const Matrix z = testutil::random_matrix(rng, d, r);
    const Matrix z_ref = testutil::random_matrix(rng, d, r);
    const double closed = procrustes_distance(z, z_ref);
    REQUIRE(closed == Catch::Approx(brute_force_distance(z, z_ref)).margin(1e-3));
  }
}

TEST_CASE("procrustes_align recovers the minimizing rotation") {
  auto rng = testutil::stream(33);
  for (int trial = 0; trial < 20; ++trial) {
    const Index r = 1 + Index(rng.below(3));
    const Matrix z_ref = testutil::random_matrix(rng, 6, r);
    const Matrix u = testutil::random_orthogonal(rng, r);
    const auto res = procrustes_align(z_ref * u, z_ref);
    REQUIRE(res.distance == Catch::Approx(0.0).margin(1e-9));
    REQUIRE((res.rotation - u).norm() < 1e-9);
    REQUIRE((res.rotation * res.rotation.transpose() - Matrix::Identity(r, r))
                .norm() < 1e-10);
  }
}

TEST_CASE("factor distance is bounded by the low-rank gap") {
  // d(Z, Z*) <= ||Z Z^T - Z* Z*^T||_F / (sqrt(2 (sqrt(2) - 1)) sigma_r(Z*))
  auto rng = testutil::stream(34);
  const double coeff = std::sqrt(2.0 * (std::sqrt(2.0) - 1.0));
  for (int trial = 0; trial < 100; ++trial) {
    const Index r = 1 + Index(rng.below(3));
    const Index d = r + 2 + Index(rng.below(10));
    const Matrix z = testutil::random_matrix(rng, d, r);
    const Matrix z_ref = testutil::random_matrix(rng, d, r);
    Eigen::JacobiSVD<Matrix> svd(z_ref);
    const double sigma_min = svd.singularValues()(r - 1);
    if (sigma_min < 1e-8) continue;  // needs full-rank reference
    const double gap = (z * z.transpose() - z_ref * z_ref.transpose()).norm();
    REQUIRE(procrustes_distance(z, z_ref) <=
            gap / (coeff * sigma_min) + 1e-9);
  }
}

TEST_CASE("identity rotation bounds the distance from above") {
  auto rng = testutil::stream(35);
  for (int trial = 0; trial < 50; ++trial) {
    const Index r = 1 + Index(rng.below(3));
    const Index d = r + 1 + Index(rng.below(10));
    const Matrix z = testutil::random_matrix(rng, d, r);
    const Matrix z_ref = testutil::random_matrix(rng, d, r);
    REQUIRE(procrustes_distance(z, z_ref) <= (z - z_ref).norm() + 1e-12);
  }
}

TEST_CASE("spikiness") {
  REQUIRE(spikiness(Matrix::Identity(3, 3)) == Catch::Approx(std::sqrt(3.0)));
  REQUIRE(spikiness(Matrix::Ones(2, 2)) == Catch::Approx(1.0));
  Matrix spike = Matrix::Zero(4, 4);
  spike(0, 0) = 1.0;
  REQUIRE(spikiness(spike) == Catch::Approx(4.0));
  REQUIRE_THROWS_AS(spikiness(Matrix::Zero(3, 3)), InputError);
}

TEST_CASE("support_metrics") {
  Matrix truth = Matrix::Zero(4, 4);
  truth(0, 1) = truth(1, 0) = 1.0;
  truth(2, 3) = truth(3, 2) = -0.5;

  SECTION("perfect recovery") {
    const auto m = support_metrics(truth, truth, 1e-9);
    REQUIRE(m.precision == 1.0);
    REQUIRE(m.recall == 1.0);
    REQUIRE(m.f1 == 1.0);
  }
  SECTION("empty estimate has zero recall") {
    const auto m = support_metrics(Matrix::Zero(4, 4), truth, 1e-9);
    REQUIRE(m.recall == 0.0);
    REQUIRE(m.f1 == 0.0);
  }
  SECTION("disjoint supports score zero") {
    Matrix other = Matrix::Zero(4, 4);
    other(0, 2) = other(2, 0) = 1.0;
    const auto m = support_metrics(other, truth, 1e-9);
    REQUIRE(m.precision == 0.0);
    REQUIRE(m.recall == 0.0);
  }
}
