#include <catch2/catch_amalgamated.hpp>

#include "splr/splr.hpp"
#include "test_util.hpp"

using namespace splr;

TEST_CASE("schur_split on a hand-computed joint precision") {
  Matrix joint(3, 3);
  joint << 2, 0, 1, 0, 2, 1, 1, 1, 2;
  const GroundTruth gt = schur_split(joint, 2, 1);

  REQUIRE(gt.sparse.isApprox(2.0 * Matrix::Identity(2, 2)));
  Matrix l_expect(2, 2);
  l_expect << -0.5, -0.5, -0.5, -0.5;
  REQUIRE(gt.low_rank.isApprox(l_expect, 1e-12));
  Matrix omega_expect(2, 2);
  omega_expect << 1.5, -0.5, -0.5, 1.5;
  REQUIRE(gt.precision.isApprox(omega_expect, 1e-12));
  REQUIRE(gt.factor);
  Matrix z_expect(2, 1);
  z_expect << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  REQUIRE(gt.factor->isApprox(z_expect, 1e-12));
  REQUIRE(gt.sign == -1);
}

TEST_CASE("lvggm generator construction identities") {
  auto rng = testutil::stream(40);
  for (int trial = 0; trial < 5; ++trial) {
    LvggmSpec spec;
    spec.dim = 50 + Index(rng.below(30));
    spec.latent = 1 + Index(rng.below(3));
    spec.seed = rng.next_u64();
    const GroundTruth gt = generate_lvggm(spec);

    REQUIRE(is_positive_definite(gt.precision));
    REQUIRE((gt.sparse + gt.low_rank - gt.precision).cwiseAbs().maxCoeff() <
            1e-10);

    Eigen::SelfAdjointEigenSolver<Matrix> es(gt.low_rank, Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues();
    REQUIRE(ev.maxCoeff() <= 1e-10);  // negative semidefinite
    // rank r: all but the r most negative eigenvalues vanish
    REQUIRE(std::abs(ev(spec.latent)) <= 1e-8 * std::abs(ev(0)));

    // default target is round(0.02 d^2), floored at d by the pair count
    const Index target = std::max<Index>(
        Index(std::llround(0.02 * double(spec.dim) * double(spec.dim))),
        spec.dim);
    REQUIRE(gt.nnz_sparse == spec.dim + 2 * ((target - spec.dim) / 2));

    REQUIRE(gt.factor);
    REQUIRE((gt.factor.value() * gt.factor.value().transpose() + gt.low_rank)
                .cwiseAbs()
                .maxCoeff() < 1e-8);
  }
}

TEST_CASE("generic generator construction identities") {
  auto rng = testutil::stream(41);
  for (int trial = 0; trial < 5; ++trial) {
    GenericSpec spec;
    spec.dim = 20 + Index(rng.below(30));
    spec.rank = 1 + Index(rng.below(3));
    spec.seed = rng.next_u64();
    const GroundTruth gt = generate_generic(spec);

    REQUIRE(is_positive_definite(gt.precision));
    Eigen::SelfAdjointEigenSolver<Matrix> es(gt.low_rank, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-10);  // positive semidefinite
    REQUIRE(gt.sign == +1);
    REQUIRE_NOTHROW(spikiness(gt.low_rank));

    // pd_margin is the floor of the assembled spectrum
    Eigen::SelfAdjointEigenSolver<Matrix> eo(gt.precision, Eigen::EigenvaluesOnly);
    REQUIRE(eo.eigenvalues().minCoeff() >= 0.99 * spec.pd_margin);
  }
}

TEST_CASE("generators are deterministic in the seed") {
  LvggmSpec spec;
  spec.dim = 25;
  spec.latent = 2;
  spec.seed = 99;
  const GroundTruth a = generate_lvggm(spec);
  const GroundTruth b = generate_lvggm(spec);
  REQUIRE(a.sparse == b.sparse);
  REQUIRE(a.low_rank == b.low_rank);

  const Dataset da = sample_gaussian(a, 100, 7);
  const Dataset db = sample_gaussian(b, 100, 7);
  REQUIRE(da.samples() == db.samples());
  const Dataset dc = sample_gaussian(a, 100, 8);
  REQUIRE(da.samples() != dc.samples());
}

TEST_CASE("gaussian sampler matches its target covariance") {
  GroundTruth gt;
  gt.sparse = Matrix::Identity(2, 2);
  gt.low_rank = Matrix::Zero(2, 2);
  gt.precision = Matrix::Identity(2, 2);
  gt.sign = 1;
  gt.rank = 1;

  const Index n = 1000000;
  const Dataset data = sample_gaussian(gt, n, 5);
  const Matrix emp = sample_covariance(data).matrix();
  REQUIRE((emp - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.01);

  const Vector mean = data.samples().colwise().mean();
  REQUIRE(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("generator input validation") {
  LvggmSpec bad;
  bad.dim = 10;
  bad.latent = 10;
  REQUIRE_THROWS_AS(generate_lvggm(bad), InputError);
  GenericSpec small;
  small.dim = 10;
  small.rank = 1;
  small.target_nnz = 5;  // below d
  REQUIRE_THROWS_AS(generate_generic(small), InputError);
}
