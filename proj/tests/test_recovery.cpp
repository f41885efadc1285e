#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "tfsense/errors.hpp"
#include "tfsense/linalg.hpp"
#include "tfsense/metrics.hpp"
#include "tfsense/recovery.hpp"

using namespace tfs;

TEST_CASE("oracle least squares") {
  Vector x = Vector::Zero(6);
  x(1) = 2.0;
  x(4) = -1.0;
  const RecoveryResult r = oracle_ls(Matrix::Identity(6, 6), x, {1, 4});
  CHECK(r.estimate == x);
  CHECK(r.residual_norm == 0.0);

  RandomStream rng(1, 0);
  const Matrix a = linalg::gaussian(10, 20, rng);
  const Vector xs = [&] {
    Vector v = Vector::Zero(20);
    v(3) = 1.5;
    v(8) = -0.5;
    v(17) = 0.25;
    return v;
  }();
  const RecoveryResult exact = oracle_ls(a, a * xs, {3, 8, 17});
  CHECK((exact.estimate - xs).norm() <= 1e-9);

  const Vector y = a * xs + 0.1 * linalg::gaussian(10, 1, rng).col(0);
  const RecoveryResult noisy = oracle_ls(a, y, {3, 8, 17});
  const Matrix aj = oracle::cols(a, {3, 8, 17});
  Vector z(3);
  z << noisy.estimate(3), noisy.estimate(8), noisy.estimate(17);
  CHECK((aj.transpose() * (aj * z - y)).norm() <= 1e-8);
  for (Index j = 0; j < 20; ++j)
    if (j != 3 && j != 8 && j != 17) CHECK(noisy.estimate(j) == 0.0);

  CHECK_THROWS_AS(oracle_ls(a, y, {8, 3}), InvalidArgument);
  CHECK_THROWS_AS(oracle_ls(a, y, {20}), InvalidArgument);
  CHECK_THROWS_AS(oracle_ls(a, Vector::Zero(3), {1}), InvalidArgument);
  Matrix dup = a;
  dup.col(5) = dup.col(4);
  CHECK_THROWS_AS(oracle_ls(dup, y, {4, 5}), SingularMatrix);
}

TEST_CASE("omp basics") {
  Vector y = Vector::Zero(8);
  y(1) = 3.0;
  y(4) = -2.0;
  y(6) = 1.0;
  const RecoveryResult r = omp(Matrix::Identity(8, 8), y, 3, 0.0);
  CHECK(r.estimate == y);
  CHECK(r.iterations == 3);
  CHECK(r.support == Support{1, 4, 6});

  const RecoveryResult zero = omp(Matrix::Identity(4, 4), Vector::Zero(4), 3, 0.0);
  CHECK(zero.estimate.isZero(0.0));
  CHECK(zero.iterations == 0);

  const RecoveryResult none = omp(Matrix::Identity(4, 4), Vector::Ones(4), 0, 0.0);
  CHECK(none.estimate.isZero(0.0));

  // equal correlations: the lowest index wins
  const RecoveryResult tie = omp(Matrix::Identity(3, 3), Vector::Ones(3), 1, 0.0);
  CHECK(tie.support == Support{0});

  Matrix zc = Matrix::Identity(3, 3);
  zc.col(2).setZero();
  CHECK_THROWS_AS(omp(zc, Vector::Ones(3), 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(omp(Matrix::Identity(3, 3), Vector::Ones(3), 4, 0.0), InvalidArgument);
}

TEST_CASE("omp selection is scale invariant and residual never grows") {
  RandomStream rng(2, 0);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = linalg::gaussian(12, 30, rng);
    const Vector y = linalg::gaussian(12, 1, rng).col(0);
    Vector scale(30);
    for (Index j = 0; j < 30; ++j) scale(j) = 0.1 + 5.0 * rng.uniform();
    const Matrix b = a * scale.asDiagonal();
    const RecoveryResult ra = omp(a, y, 8, 0.0);
    const RecoveryResult rb = omp(b, y, 8, 0.0);
    CHECK(ra.support == rb.support);
    CHECK(std::set<Index>(ra.support.begin(), ra.support.end()).size() == ra.support.size());

    double prev = y.norm();
    for (Index k = 1; k <= 8; ++k) {
      const double res = omp(a, y, k, 0.0).residual_norm;
      CHECK(res <= prev + 1e-12);
      prev = res;
    }
  }
}

TEST_CASE("omp stops at the residual tolerance") {
  Vector y(4);
  y << 4, 2, 0.1, 0;
  const RecoveryResult r = omp(Matrix::Identity(4, 4), y, 4, 0.5);
  CHECK(r.iterations == 2);
  CHECK(r.residual_norm == doctest::Approx(0.1));
}

TEST_CASE("bpdn simple cases") {
  RandomStream rng(3, 0);
  const Vector y = linalg::gaussian(5, 1, rng).col(0);
  const RecoveryResult id = bpdn(Matrix::Identity(5, 5), y, {});
  CHECK((id.estimate - y).norm() <= 1e-6);

  const RecoveryResult z = bpdn(linalg::gaussian(4, 9, rng), Vector::Zero(4), {});
  CHECK(z.estimate.norm() <= 1e-9);

  // y outside the range of a rank-one A
  Matrix a = Matrix::Zero(3, 4);
  a(0, 0) = 1.0;
  Vector out(3);
  out << 1, 1, 0;
  CHECK_THROWS_AS(bpdn(a, out, {}), Infeasible);
  BpdnParams loose;
  loose.epsilon = 2.0;
  CHECK_NOTHROW(bpdn(a, out, loose));

  BpdnParams bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bpdn(a, out, bad), InvalidArgument);
  bad = {};
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bpdn(a, out, bad), InvalidArgument);
}

TEST_CASE("bpdn is feasible and l1 minimal on small instances") {
  RandomStream rng(4, 0);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const Index m = 4, nhat = 8;
    const Matrix a = linalg::gaussian(m, nhat, rng);
    const SparseSignal x = gen_sparse_signal({nhat, 1, SpikeKind::Gaussian}, rng);
    const Vector y = a * x.dense();
    const RecoveryResult r = bpdn(a, y, {});
    if (!r.converged) continue;
    ++checked;
    CHECK(r.residual_norm <= 1e-6);
    CHECK(r.estimate.lpNorm<1>() == doctest::Approx(oracle::l1_min_equality(a, y)).epsilon(1e-4));
  }
  CHECK(checked >= 28);

  // noisy budget: feasibility and no worse l1 than the true signal
  for (int t = 0; t < 20; ++t) {
    const Matrix a = linalg::gaussian(20, 40, rng) / std::sqrt(20.0);
    const SparseSignal x = gen_sparse_signal({40, 3, SpikeKind::Rademacher}, rng);
    const Vector noise = 0.01 * linalg::gaussian(20, 1, rng).col(0);
    BpdnParams p;
    p.epsilon = std::max(noise.norm(), default_bpdn_epsilon(1e-4, 20));
    const RecoveryResult r = bpdn(a, a * x.dense() + noise, p);
    CHECK(r.residual_norm <= p.epsilon + 1e-6);
    CHECK(r.estimate.lpNorm<1>() <= x.dense().lpNorm<1>() + 1e-5);
  }
}

TEST_CASE("bpdn reports non-convergence with a feasible iterate") {
  RandomStream rng(5, 0);
  const Matrix a = linalg::gaussian(10, 30, rng);
  const Vector y = linalg::gaussian(10, 1, rng).col(0);
  BpdnParams p;
  p.max_iterations = 3;
  p.tolerance = 1e-14;
  const RecoveryResult r = bpdn(a, y, p);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.residual_norm <= 1e-6);
}

TEST_CASE("default epsilon") {
  CHECK(default_bpdn_epsilon(0.0, 40) == 0.0);
  CHECK(default_bpdn_epsilon(1e-4, 40) ==
        doctest::Approx(std::sqrt(1e-4 * (40.0 + 2.0 * std::sqrt(80.0)))).epsilon(1e-15));
}

TEST_CASE("practical estimators do not beat the oracle on average") {
  RandomStream rng(6, 0);
  const Matrix a = linalg::gaussian(30, 60, rng) / std::sqrt(30.0);
  const double sigma2 = 1e-3;
  const int trials = 300;
  std::vector<double> d_omp, d_bp;
  for (int t = 0; t < trials; ++t) {
    const SparseSignal x = gen_sparse_signal({60, 4, SpikeKind::Rademacher}, rng);
    const Vector y = measure_equivalent(a, x, {sigma2}, rng);
    const double lo = (oracle_ls(a, y, x.support).estimate - x.dense()).squaredNorm();
    d_omp.push_back((omp(a, y, 4).estimate - x.dense()).squaredNorm() - lo);
    BpdnParams p;
    p.epsilon = default_bpdn_epsilon(sigma2, 30);
    d_bp.push_back((bpdn(a, y, p).estimate - x.dense()).squaredNorm() - lo);
  }
  for (const auto* d : {&d_omp, &d_bp}) {
    double mean = 0.0, ss = 0.0;
    for (double v : *d) mean += v;
    mean /= trials;
    for (double v : *d) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (trials - 1) / trials);
    CHECK(mean >= -3.0 * se);
  }
}
