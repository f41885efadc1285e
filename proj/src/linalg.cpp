#include "tfsense/linalg.hpp"

#include <cmath>
#include <limits>

#include "tfsense/errors.hpp"

namespace tfs::linalg {

Matrix gaussian(Index rows, Index cols, RandomStream& rng) {
  Matrix g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

Matrix random_orthonormal(Index rows, Index cols, RandomStream& rng) {
  if (cols > rows) throw InvalidArgument("random_orthonormal: cols > rows");
  const Matrix g = gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the sign ambiguity of QR so the result is Haar distributed.
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < cols; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix scale_to_frobenius(const Matrix& a, double target) {
  const double sq = a.squaredNorm();
  if (!(sq > 0.0)) throw InvalidArgument("cannot rescale a zero matrix");
  return a * std::sqrt(target / sq);
}

double spd_condition(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

LeftSvd left_svd(const Matrix& psi) {
  const Matrix g = psi * psi.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  const Index n = g.rows();
  LeftSvd out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    // Eigen returns ascending eigenvalues.
    const Index src = n - 1 - i;
    out.values(i) = std::sqrt(std::max(es.eigenvalues()(src), 0.0));
    out.u.col(i) = es.eigenvectors().col(src);
  }
  return out;
}

Matrix columns(const Matrix& a, const Support& support) {
  Matrix out(a.rows(), static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) out.col(static_cast<Index>(k)) = a.col(support[k]);
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const std::uint64_t num = n - k + i;
    if (result > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    result = result * num / i;
  }
  return result;
}

void for_each_subset(Index n, Index k, const std::function<void(const Support&)>& visit) {
  if (k < 0 || k > n) return;
  Support idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace tfs::linalg
