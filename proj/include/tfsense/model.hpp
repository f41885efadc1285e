#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tfsense/random.hpp"

namespace tfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
/// Sorted, duplicate-free column indices.
using Support = std::vector<Index>;

/// Sparsifying dictionary Psi (n x nhat, nhat >= n).
class Dictionary {
 public:
  explicit Dictionary(Matrix psi);

  const Matrix& matrix() const { return psi_; }
  Index n() const { return psi_.rows(); }
  Index nhat() const { return psi_.cols(); }

 private:
  Matrix psi_;
};

/// Projection Phi (m x n, m <= n).
class SensingMatrix {
 public:
  explicit SensingMatrix(Matrix phi);

  const Matrix& matrix() const { return phi_; }
  Index m() const { return phi_.rows(); }
  Index n() const { return phi_.cols(); }

 private:
  Matrix phi_;
};

enum class SpikeKind { Rademacher, Gaussian };

struct SignalModel {
  Index nhat = 0;
  Index s = 0;
  SpikeKind spikes = SpikeKind::Rademacher;
};

struct SparseSignal {
  Index nhat = 0;
  Support support;
  std::vector<double> values;

  Vector dense() const;
};

struct NoiseModel {
  double sigma2 = 0.0;
};

/// i.i.d. N(0,1) entries, rescaled so that ||Psi||_F^2 = nhat.
Dictionary gen_gaussian_dictionary(Index n, Index nhat, RandomStream& rng);

/// Psi = U diag(1, r, r^2, ...) V^T with Haar-random U (n x n) and
/// V (nhat x nhat), rescaled so that ||Psi||_F^2 = nhat.
Dictionary gen_specified_dictionary(Index n, Index nhat, double ratio, RandomStream& rng);

Dictionary canonical_dictionary(Index n);

/// Exactly s nonzeros on a support drawn uniformly among all s-subsets.
SparseSignal gen_sparse_signal(const SignalModel& model, RandomStream& rng);

/// y = Phi Psi x + noise, noise ~ N(0, sigma2 I).
Vector measure(const SensingMatrix& phi, const Dictionary& psi, const SparseSignal& x,
               const NoiseModel& noise, RandomStream& rng);

/// y = A x + noise for an already formed equivalent matrix A = Phi Psi.
Vector measure_equivalent(const Matrix& a, const SparseSignal& x, const NoiseModel& noise,
                          RandomStream& rng);

}  // namespace tfs
