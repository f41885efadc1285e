#pragma once

// Reference computations for the tests. Each one takes a different route
// from the library code it checks (explicit enumeration, full SVD, LU
// inverses) so that a shared bug cannot hide.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "tfsense/model.hpp"

namespace oracle {

using tfs::Index;
using tfs::Matrix;
using tfs::Support;
using tfs::Vector;

inline void subsets_rec(Index n, Index k, Index start, Support& cur, std::vector<Support>& out) {
  if (static_cast<Index>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (Index i = start; i < n; ++i) {
    cur.push_back(i);
    subsets_rec(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<Support> subsets(Index n, Index k) {
  std::vector<Support> out;
  Support cur;
  subsets_rec(n, k, 0, cur, out);
  return out;
}

inline Matrix cols(const Matrix& a, const Support& j) {
  Matrix out(a.rows(), static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) out.col(static_cast<Index>(k)) = a.col(j[k]);
  return out;
}

// delta_s from singular values of every column subset.
inline double ric(const Matrix& a, Index s) {
  double best = 0.0;
  for (const auto& j : subsets(a.cols(), s)) {
    Eigen::JacobiSVD<Matrix> svd(cols(a, j));
    const Vector sv = svd.singularValues();
    const double hi = sv(0) * sv(0);
    const double lo = sv.size() == s ? sv(s - 1) * sv(s - 1) : 0.0;
    best = std::max({best, std::abs(hi - 1.0), std::abs(lo - 1.0)});
  }
  return best;
}

inline double trace_inverse(const Matrix& q, const Support& j) {
  Matrix sub(j.size(), j.size());
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j.size(); ++c) sub(r, c) = q(j[r], j[c]);
  return sub.fullPivLu().inverse().trace();
}

inline double mean_trace_inverse(const Matrix& q, Index s) {
  double acc = 0.0;
  const auto all = subsets(q.rows(), s);
  for (const auto& j : all) acc += trace_inverse(q, j);
  return acc / static_cast<double>(all.size());
}

inline double max_offdiag(const Matrix& a) {
  double mu = 0.0;
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j) mu = std::max(mu, std::abs(a.col(i).dot(a.col(j))));
  return mu;
}

// Sylvester construction; m must be a power of two.
inline Matrix hadamard(Index m) {
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < m) {
    const Index k = h.rows();
    Matrix next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = next;
  }
  return h;
}

// Six diagonals of the icosahedron: a 3 x 6 equiangular frame, mu = 1/sqrt(5).
inline Matrix icosahedron_frame() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  Matrix f(3, 6);
  f << 0, 0, 1, -1, p, p,
       1, -1, p, p, 0, 0,
       p, p, 0, 0, 1, -1;
  return f / std::sqrt(1.0 + p * p);
}

// Symmetric inverse square root through the eigendecomposition.
inline Matrix inv_sqrt(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(spd);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// min ||x||_1 subject to A x = y, by enumerating basic solutions.
inline double l1_min_equality(const Matrix& a, const Vector& y) {
  double best = std::numeric_limits<double>::infinity();
  const Index m = a.rows();
  for (Index k = 1; k <= m; ++k) {
    for (const auto& j : subsets(a.cols(), k)) {
      const Matrix aj = cols(a, j);
      Eigen::JacobiSVD<Matrix> svd(aj, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues()(k - 1) < 1e-10) continue;
      const Vector z = svd.solve(y);
      if ((aj * z - y).norm() > 1e-9) continue;
      best = std::min(best, z.lpNorm<1>());
    }
  }
  return best;
}

}  // namespace oracle
