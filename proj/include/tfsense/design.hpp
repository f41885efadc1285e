#pragma once

#include <string>

#include "tfsense/linalg.hpp"
#include "tfsense/model.hpp"

namespace tfs {

/// Row-Parseval m x nhat matrix: B B^T = I_m.
class ParsevalTarget {
 public:
  explicit ParsevalTarget(Matrix b);

  const Matrix& matrix() const { return b_; }
  Index m() const { return b_.rows(); }
  Index nhat() const { return b_.cols(); }

 private:
  Matrix b_;
};

enum class DesignKind { Gaussian, Tf1, Tf2 };
enum class LeftFactor { Identity, RandomOrthonormal };

struct DesignMethod {
  DesignKind kind = DesignKind::Gaussian;
  double alpha = 1.0;                          // Tf1 only
  LeftFactor left = LeftFactor::Identity;      // Tf2 only

  static DesignMethod gaussian() { return {}; }
  static DesignMethod tf1(double alpha);
  static DesignMethod tf2(LeftFactor left = LeftFactor::Identity);

  /// "gaussian", "tf1(alpha=<v>)", "tf2" or "tf2(left=random)".
  std::string label() const;
  static DesignMethod parse(const std::string& label);

  friend bool operator==(const DesignMethod&, const DesignMethod&) = default;
};

/// Generic Parseval frame: SVD of an m x nhat Gaussian matrix with every
/// singular value replaced by one.
ParsevalTarget gen_parseval_target(Index m, Index nhat, RandomStream& rng);

/// Gaussian entries, normalized to ||Phi||_F^2 = n.
SensingMatrix design_gaussian(Index m, Index n, RandomStream& rng);

/// Unnormalized regularized target matching:
/// argmin ||Phi Psi - B||_F^2 + alpha ||Phi||_F^2 = B Psi^T (Psi Psi^T + alpha I)^-1.
Matrix tf1_raw(const Dictionary& psi, const ParsevalTarget& target, double alpha);
SensingMatrix design_tf1(const Dictionary& psi, const ParsevalTarget& target, double alpha);

/// Spectrum of a dictionary prepared for the mode-inversion design. Reusable
/// across calls when the dictionary is fixed.
struct Tf2Plan {
  Index n = 0;
  linalg::LeftSvd svd;
};
Tf2Plan plan_tf2(const Dictionary& psi);

/// Minimum-energy Phi subject to Phi Psi Psi^T Phi^T = I_m:
///   Phi = U_left diag(1/l_m, ..., 1/l_1) [u_m, ..., u_1]^T
/// with l_k, u_k the k-th singular value / left singular vector of Psi.
/// When l_m is repeated across the cut, the retained part of that eigenspace
/// is chosen Haar-uniformly from `rng`.
Matrix tf2_raw(const Tf2Plan& plan, Index m, LeftFactor left, RandomStream& rng);
SensingMatrix design_tf2(const Dictionary& psi, Index m, LeftFactor left, RandomStream& rng);
SensingMatrix design_tf2(const Tf2Plan& plan, Index m, LeftFactor left, RandomStream& rng);

/// sqrt(n) Phi / ||Phi||_F.
SensingMatrix normalize_sensing(const Matrix& phi, Index n);

/// ||A^T A - (m/nhat) I||_F^2 for an m x nhat matrix A.
double tightness_objective(const Matrix& a);

/// m x (m+1) unit-norm equiangular tight frame (regular simplex), mu = 1/m.
Matrix simplex_frame(Index m);

/// Dispatch on `method`. TF1 draws its Parseval target from `rng`.
SensingMatrix design(const DesignMethod& method, const Dictionary& psi, Index m, RandomStream& rng);

}  // namespace tfs
