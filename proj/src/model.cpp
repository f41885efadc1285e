#include "tfsense/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tfsense/errors.hpp"
#include "tfsense/linalg.hpp"

namespace tfs {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

}  // namespace

Dictionary::Dictionary(Matrix psi) : psi_(std::move(psi)) {
  if (psi_.rows() < 1 || psi_.cols() < 1) throw InvalidArgument("dictionary: empty matrix");
  if (psi_.cols() < psi_.rows())
    throw InvalidArgument("dictionary: nhat (" + std::to_string(psi_.cols()) + ") < n (" +
                          std::to_string(psi_.rows()) + ")");
  require_finite(psi_, "dictionary");
}

SensingMatrix::SensingMatrix(Matrix phi) : phi_(std::move(phi)) {
  if (phi_.rows() < 1 || phi_.cols() < 1) throw InvalidArgument("sensing matrix: empty matrix");
  if (phi_.rows() > phi_.cols())
    throw InvalidArgument("sensing matrix: m (" + std::to_string(phi_.rows()) + ") > n (" +
                          std::to_string(phi_.cols()) + ")");
  require_finite(phi_, "sensing matrix");
}

Vector SparseSignal::dense() const {
  Vector x = Vector::Zero(nhat);
  for (std::size_t k = 0; k < support.size(); ++k) x(support[k]) = values[k];
  return x;
}

Dictionary gen_gaussian_dictionary(Index n, Index nhat, RandomStream& rng) {
  if (n < 1 || nhat < n) throw InvalidArgument("gen_gaussian_dictionary: need 1 <= n <= nhat");
  return Dictionary(linalg::scale_to_frobenius(linalg::gaussian(n, nhat, rng), static_cast<double>(nhat)));
}

Dictionary gen_specified_dictionary(Index n, Index nhat, double ratio, RandomStream& rng) {
  if (n < 1 || nhat < n) throw InvalidArgument("gen_specified_dictionary: need 1 <= n <= nhat");
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw InvalidArgument("gen_specified_dictionary: ratio must lie in (0, 1]");
  const Matrix u = linalg::random_orthonormal(n, n, rng);
  // Only the first n right singular vectors meet a nonzero singular value.
  const Matrix v = linalg::random_orthonormal(nhat, n, rng);
  Vector sv(n);
  double lambda = 1.0;
  for (Index i = 0; i < n; ++i, lambda *= ratio) sv(i) = lambda;
  const Matrix psi = u * sv.asDiagonal() * v.transpose();
  return Dictionary(linalg::scale_to_frobenius(psi, static_cast<double>(nhat)));
}

Dictionary canonical_dictionary(Index n) {
  if (n < 1) throw InvalidArgument("canonical_dictionary: n must be >= 1");
  return Dictionary(Matrix::Identity(n, n));
}

SparseSignal gen_sparse_signal(const SignalModel& model, RandomStream& rng) {
  if (model.nhat < 1 || model.s < 0) throw InvalidArgument("gen_sparse_signal: invalid model");
  if (model.s > model.nhat)
    throw InvalidArgument("gen_sparse_signal: s (" + std::to_string(model.s) + ") > nhat (" +
                          std::to_string(model.nhat) + ")");
  SparseSignal x;
  x.nhat = model.nhat;
  std::vector<Index> all(static_cast<std::size_t>(model.nhat));
  std::iota(all.begin(), all.end(), Index{0});
  // Selection sampling: uniform over s-subsets, output already sorted.
  x.support.reserve(static_cast<std::size_t>(model.s));
  std::sample(all.begin(), all.end(), std::back_inserter(x.support), model.s, rng);
  x.values.reserve(x.support.size());
  for (std::size_t k = 0; k < x.support.size(); ++k)
    x.values.push_back(model.spikes == SpikeKind::Rademacher ? rng.sign() : rng.normal());
  return x;
}

Vector measure_equivalent(const Matrix& a, const SparseSignal& x, const NoiseModel& noise,
                          RandomStream& rng) {
  if (x.nhat != a.cols())
    throw InvalidArgument("measure: signal length " + std::to_string(x.nhat) +
                          " does not match " + std::to_string(a.cols()) + " columns");
  if (noise.sigma2 < 0.0) throw InvalidArgument("measure: negative noise variance");
  Vector y = Vector::Zero(a.rows());
  for (std::size_t k = 0; k < x.support.size(); ++k) y += x.values[k] * a.col(x.support[k]);
  if (noise.sigma2 > 0.0) {
    const double sd = std::sqrt(noise.sigma2);
    for (Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  }
  return y;
}

Vector measure(const SensingMatrix& phi, const Dictionary& psi, const SparseSignal& x,
               const NoiseModel& noise, RandomStream& rng) {
  if (phi.n() != psi.n())
    throw InvalidArgument("measure: Phi has " + std::to_string(phi.n()) +
                          " columns but Psi has " + std::to_string(psi.n()) + " rows");
  if (x.nhat != psi.nhat()) throw InvalidArgument("measure: signal length does not match Psi");
  const Vector f = psi.matrix() * x.dense();
  Vector y = phi.matrix() * f;
  if (noise.sigma2 < 0.0) throw InvalidArgument("measure: negative noise variance");
  if (noise.sigma2 > 0.0) {
    const double sd = std::sqrt(noise.sigma2);
    for (Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  }
  return y;
}

}  // namespace tfs
