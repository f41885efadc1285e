#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tfsense/errors.hpp"
#include "tfsense/linalg.hpp"
#include "tfsense/matrix_io.hpp"
#include "tfsense/model.hpp"

using namespace tfs;

TEST_CASE("random stream is a pure function of seed and stream id") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  RandomStream e(42, 7);
  CHECK(e.substream(3)() == RandomStream(42, 7).substream(3)());
  CHECK(e.substream(3)() != e.substream(4)());
}

TEST_CASE("random stream moments") {
  RandomStream rng(1, 2);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, usum = 0.0;
  std::uint64_t counts[5] = {};
  int plus = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    usum += u;
    counts[rng.below(5)]++;
    plus += rng.sign() > 0;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.015);
  CHECK(std::abs(usum / n - 0.5) < 0.005);
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) / n - 0.2) < 0.005);
  CHECK(std::abs(static_cast<double>(plus) / n - 0.5) < 0.005);
}

TEST_CASE("gaussian dictionary is Frobenius normalized and full rank") {
  RandomStream rng(7, 0);
  const Dictionary psi = gen_gaussian_dictionary(64, 80, rng);
  CHECK(psi.n() == 64);
  CHECK(psi.nhat() == 80);
  CHECK(psi.matrix().squaredNorm() == doctest::Approx(80.0).epsilon(1e-12));

  RandomStream one(3, 0);
  const Dictionary tiny = gen_gaussian_dictionary(1, 1, one);
  CHECK(std::abs(tiny.matrix()(0, 0)) == doctest::Approx(1.0).epsilon(1e-15));

  RandomStream r0(0, 0);
  const Dictionary small = gen_gaussian_dictionary(4, 6, r0);
  Eigen::JacobiSVD<Matrix> svd(small.matrix());
  CHECK(svd.singularValues().minCoeff() > 1e-6);

  RandomStream bad(0, 0);
  CHECK_THROWS_AS(gen_gaussian_dictionary(5, 4, bad), InvalidArgument);
  CHECK_THROWS_AS(gen_gaussian_dictionary(0, 4, bad), InvalidArgument);
}

TEST_CASE("specified dictionary follows the geometric spectrum") {
  RandomStream rng(11, 0);
  const Dictionary psi = gen_specified_dictionary(4, 5, 0.5, rng);
  CHECK(psi.matrix().squaredNorm() == doctest::Approx(5.0).epsilon(1e-12));
  Eigen::JacobiSVD<Matrix> svd(psi.matrix());
  const Vector sv = svd.singularValues();
  for (Index i = 0; i + 1 < sv.size(); ++i) CHECK(std::abs(sv(i + 1) / sv(i) - 0.5) < 1e-8);

  RandomStream r2(12, 0);
  const Dictionary flat = gen_specified_dictionary(3, 3, 1.0, r2);
  const Matrix g = flat.matrix().transpose() * flat.matrix();
  CHECK((g - Matrix::Identity(3, 3)).norm() < 1e-10);

  RandomStream r3(13, 0);
  const Dictionary big = gen_specified_dictionary(200, 240, 0.995, r3);
  Eigen::JacobiSVD<Matrix> bsvd(big.matrix());
  const Vector bs = bsvd.singularValues();
  double worst = 0.0;
  for (Index i = 0; i + 1 < bs.size(); ++i) worst = std::max(worst, std::abs(bs(i + 1) / bs(i) - 0.995));
  CHECK(worst < 1e-8);

  CHECK_THROWS_AS(gen_specified_dictionary(3, 3, 0.0, r3), InvalidArgument);
  CHECK_THROWS_AS(gen_specified_dictionary(3, 3, 1.5, r3), InvalidArgument);
}

TEST_CASE("canonical dictionary") {
  CHECK(canonical_dictionary(3).matrix() == Matrix::Identity(3, 3));
  CHECK(canonical_dictionary(1).matrix()(0, 0) == 1.0);
  CHECK(oracle::max_offdiag(canonical_dictionary(64).matrix()) == 0.0);
}

TEST_CASE("sparse signals") {
  RandomStream rng(5, 0);
  const SparseSignal x = gen_sparse_signal({80, 4, SpikeKind::Rademacher}, rng);
  REQUIRE(x.support.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(x.values[k]) == 1.0);
    if (k) CHECK(x.support[k] > x.support[k - 1]);
  }
  const Vector d = x.dense();
  CHECK((d.array() != 0.0).count() == 4);

  const SparseSignal full = gen_sparse_signal({5, 5, SpikeKind::Rademacher}, rng);
  CHECK((full.dense().array() != 0.0).count() == 5);

  CHECK_THROWS_AS(gen_sparse_signal({5, 6, SpikeKind::Rademacher}, rng), InvalidArgument);
}

TEST_CASE("sparse support is uniform and second moment is diagonal") {
  std::vector<int> freq(20, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RandomStream rng(seed, 1);
    for (Index j : gen_sparse_signal({20, 3, SpikeKind::Rademacher}, rng).support) freq[j]++;
  }
  double chi2 = 0.0;
  for (int f : freq) {
    CHECK(std::abs(f / 10000.0 - 0.15) < 0.01);
    chi2 += (f - 1500.0) * (f - 1500.0) / 1500.0;
  }
  CHECK(chi2 < 43.82);  // 0.999 quantile, 19 degrees of freedom

  // E[x x^T] = (s/nhat) I for unit-power spikes.
  const Index nhat = 8, s = 3;
  const int draws = 100000;
  Matrix acc = Matrix::Zero(nhat, nhat);
  Matrix acc2 = Matrix::Zero(nhat, nhat);
  RandomStream rng(99, 1);
  for (int t = 0; t < draws; ++t) {
    const Vector x = gen_sparse_signal({nhat, s, SpikeKind::Gaussian}, rng).dense();
    const Matrix o = x * x.transpose();
    acc += o;
    acc2 += o.cwiseProduct(o);
  }
  acc /= draws;
  acc2 /= draws;
  for (Index i = 0; i < nhat; ++i)
    for (Index j = 0; j < nhat; ++j) {
      const double se = std::sqrt(std::max(acc2(i, j) - acc(i, j) * acc(i, j), 0.0) / draws);
      const double want = i == j ? static_cast<double>(s) / nhat : 0.0;
      CHECK(std::abs(acc(i, j) - want) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("measure") {
  RandomStream rng(0, 0);
  const SensingMatrix phi(Matrix::Identity(2, 2));
  const Dictionary psi(Matrix::Identity(2, 2));
  SparseSignal x{2, {0}, {1.0}};
  const Vector y = measure(phi, psi, x, {0.0}, rng);
  CHECK(y == Vector::Unit(2, 0));
  SparseSignal zero{2, {}, {}};
  CHECK(measure(phi, psi, zero, {0.0}, rng).isZero(0.0));

  RandomStream r2(4, 0);
  const Dictionary gpsi = gen_gaussian_dictionary(6, 9, r2);
  const SensingMatrix gphi(linalg::gaussian(3, 6, r2));
  const SparseSignal gx = gen_sparse_signal({9, 2, SpikeKind::Gaussian}, r2);
  const Vector exact = gphi.matrix() * (gpsi.matrix() * gx.dense());
  CHECK(measure(gphi, gpsi, gx, {0.0}, r2) == exact);
  CHECK_THROWS_AS(measure(SensingMatrix(Matrix::Identity(3, 3)), gpsi, gx, {0.0}, r2), InvalidArgument);

  // chi-square mean of the noise energy
  const Matrix a = gphi.matrix() * gpsi.matrix();
  const Vector clean = a * gx.dense();
  const int draws = 100000;
  double acc = 0.0;
  RandomStream r3(6, 0);
  for (int t = 0; t < draws; ++t) acc += (measure_equivalent(a, gx, {1e-4}, r3) - clean).squaredNorm();
  CHECK(acc / draws == doctest::Approx(3e-4).epsilon(0.02));
}

TEST_CASE("matrix text round trip") {
  Matrix m(3, 2);
  m << 1.0 / 3.0, -2.5e-300, 1e300, 0.0, -0.1, 12345.678901234567;
  std::stringstream ss;
  write_matrix(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("3 2\n", 0) == 0);
  const Matrix back = read_matrix(ss);
  CHECK(back == m);
  std::stringstream again;
  write_matrix(again, back);
  CHECK(again.str() == text);

  const auto path = std::filesystem::temp_directory_path() / "tfsense_roundtrip.txt";
  save_matrix(m, path);
  CHECK(load_matrix(path) == m);
  std::filesystem::remove(path);
}

TEST_CASE("matrix text errors") {
  std::stringstream short_body("2 2\n1 2 3\n");
  CHECK_THROWS_WITH_AS(read_matrix(short_body), doctest::Contains("header declares 4 entries, found 3"), FormatError);
  std::stringstream long_body("1 2\n1 2 3\n");
  CHECK_THROWS_AS(read_matrix(long_body), FormatError);
  std::stringstream bad_header("x 2\n1 2\n");
  CHECK_THROWS_AS(read_matrix(bad_header), FormatError);
  std::stringstream nan_entry("1 1\nnan\n");
  CHECK_THROWS_AS(read_matrix(nan_entry), FormatError);
  std::stringstream zero_dims("0 2\n");
  CHECK_THROWS_AS(read_matrix(zero_dims), FormatError);
  CHECK_THROWS_AS(load_matrix("/nonexistent/dir/matrix.txt"), IoError);
}

TEST_CASE("dictionary and sensing matrix invariants") {
  CHECK_THROWS_AS(Dictionary(Matrix::Zero(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(SensingMatrix(Matrix::Zero(3, 2)), InvalidArgument);
  Matrix inf = Matrix::Identity(2, 2);
  inf(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dictionary{inf}, InvalidArgument);
}
