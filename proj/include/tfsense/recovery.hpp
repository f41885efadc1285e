#pragma once

#include "tfsense/model.hpp"

namespace tfs {

struct RecoveryResult {
  Vector estimate;
  Support support;
  Index iterations = 0;
  double residual_norm = 0.0;
  bool converged = true;
};

/// Least squares restricted to a known support; zero elsewhere.
RecoveryResult oracle_ls(const Matrix& a, const Vector& y, const Support& support);

/// Orthogonal matching pursuit. Atoms are ranked by |a_j^T r| / ||a_j||
/// (lowest index wins ties) and the coefficients are re-fitted by least
/// squares after every selection. Stops after `max_support` atoms or once
/// ||r|| <= residual_tol.
RecoveryResult omp(const Matrix& a, const Vector& y, Index max_support, double residual_tol = 0.0);

struct BpdnParams {
  double epsilon = 0.0;
  Index max_iterations = 5000;
  double tolerance = 1e-7;
  double penalty = 1.0;
};

/// min ||x||_1 s.t. ||Ax - y||_2 <= epsilon, by ADMM on the split x = u:
/// x is projected onto the residual ball, u is soft-thresholded. The
/// returned estimate is the (always feasible) projected iterate. Throws
/// Infeasible when no x meets the residual budget.
RecoveryResult bpdn(const Matrix& a, const Vector& y, const BpdnParams& params);

/// sqrt(sigma2 (m + 2 sqrt(2m))): a high-probability bound on ||noise||_2.
double default_bpdn_epsilon(double sigma2, Index m);

}  // namespace tfs
