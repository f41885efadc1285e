#pragma once

#include <cstdint>
#include <functional>

#include "tfsense/model.hpp"

// Small dense helpers shared by the design, metrics and recovery modules.
namespace tfs::linalg {

/// Inversions are refused above this 2-norm condition number.
inline constexpr double kMaxCondition = 1e12;

Matrix gaussian(Index rows, Index cols, RandomStream& rng);

/// Haar-distributed matrix with orthonormal columns (rows >= cols).
Matrix random_orthonormal(Index rows, Index cols, RandomStream& rng);

/// Positive multiple of `a` with squared Frobenius norm `target`.
Matrix scale_to_frobenius(const Matrix& a, double target);

/// Condition number of a symmetric PSD matrix; +inf when its smallest
/// eigenvalue is not positive.
double spd_condition(const Matrix& sym);

/// Singular values (descending) and left singular vectors of a wide matrix,
/// obtained from the eigendecomposition of psi psi^T.
struct LeftSvd {
  Vector values;
  Matrix u;
};
LeftSvd left_svd(const Matrix& psi);

/// Columns of `a` selected by `support`.
Matrix columns(const Matrix& a, const Support& support);

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Calls `visit` for every k-subset of {0..n-1} in lexicographic order.
void for_each_subset(Index n, Index k, const std::function<void(const Support&)>& visit);

}  // namespace tfs::linalg
