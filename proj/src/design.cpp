#include "tfsense/design.hpp"

#include <charconv>
#include <cmath>

#include "tfsense/errors.hpp"

namespace tfs {

namespace {

constexpr double kParsevalTol = 1e-8;
constexpr double kRankFloor = 1e-12;

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Relative tolerance under which two singular values count as equal.
constexpr double kDegenerateRel = 1e-10;

}  // namespace

ParsevalTarget::ParsevalTarget(Matrix b) : b_(std::move(b)) {
  if (b_.rows() < 1 || b_.rows() > b_.cols()) throw InvalidArgument("Parseval target must be m x nhat with 1 <= m <= nhat");
  const double defect = (b_ * b_.transpose() - Matrix::Identity(b_.rows(), b_.rows())).norm();
  if (!(defect <= kParsevalTol))
    throw InvalidArgument("Parseval target violates B B^T = I (defect " + std::to_string(defect) + ")");
}

DesignMethod DesignMethod::tf1(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("tf1: alpha must be finite and >= 0");
  DesignMethod d;
  d.kind = DesignKind::Tf1;
  d.alpha = alpha;
  return d;
}

DesignMethod DesignMethod::tf2(LeftFactor left) {
  DesignMethod d;
  d.kind = DesignKind::Tf2;
  d.left = left;
  return d;
}

std::string DesignMethod::label() const {
  switch (kind) {
    case DesignKind::Gaussian:
      return "gaussian";
    case DesignKind::Tf1:
      return "tf1(alpha=" + shortest(alpha) + ")";
    case DesignKind::Tf2:
      return left == LeftFactor::Identity ? "tf2" : "tf2(left=random)";
  }
  return {};
}

DesignMethod DesignMethod::parse(const std::string& label) {
  if (label == "gaussian") return gaussian();
  if (label == "tf2") return tf2();
  if (label == "tf2(left=random)") return tf2(LeftFactor::RandomOrthonormal);
  const std::string prefix = "tf1(alpha=";
  if (label.size() > prefix.size() + 1 && label.compare(0, prefix.size(), prefix) == 0 && label.back() == ')') {
    const char* first = label.data() + prefix.size();
    const char* last = label.data() + label.size() - 1;
    double alpha = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, alpha);
    if (ec == std::errc() && ptr == last) return tf1(alpha);
  }
  throw InvalidArgument("unknown design \"" + label +
                        "\" (expected gaussian, tf1(alpha=<a>), tf2 or tf2(left=random))");
}

ParsevalTarget gen_parseval_target(Index m, Index nhat, RandomStream& rng) {
  if (m < 1 || m > nhat) throw InvalidArgument("gen_parseval_target: need 1 <= m <= nhat");
  const Matrix g = linalg::gaussian(m, nhat, rng);
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ParsevalTarget(svd.matrixU() * svd.matrixV().transpose());
}

SensingMatrix design_gaussian(Index m, Index n, RandomStream& rng) {
  if (m < 1 || m > n) throw InvalidArgument("design_gaussian: need 1 <= m <= n");
  return normalize_sensing(linalg::gaussian(m, n, rng), n);
}

Matrix tf1_raw(const Dictionary& psi, const ParsevalTarget& target, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("tf1: alpha must be finite and >= 0");
  if (target.nhat() != psi.nhat())
    throw InvalidArgument("tf1: target has " + std::to_string(target.nhat()) + " columns, dictionary has " +
                          std::to_string(psi.nhat()));
  if (target.m() > psi.n()) throw InvalidArgument("tf1: m exceeds n");
  const Matrix& p = psi.matrix();
  Matrix system = p * p.transpose();
  system.diagonal().array() += alpha;
  const double cond = linalg::spd_condition(system);
  if (!(cond < linalg::kMaxCondition))
    throw SingularMatrix("tf1: Psi Psi^T + alpha I is singular (condition " + std::to_string(cond) + ")");
  // The system matrix is symmetric, so solve for the transpose.
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw SingularMatrix("tf1: Cholesky factorization failed");
  return llt.solve(p * target.matrix().transpose()).transpose();
}

SensingMatrix design_tf1(const Dictionary& psi, const ParsevalTarget& target, double alpha) {
  return normalize_sensing(tf1_raw(psi, target, alpha), psi.n());
}

Tf2Plan plan_tf2(const Dictionary& psi) { return Tf2Plan{psi.n(), linalg::left_svd(psi.matrix())}; }

Matrix tf2_raw(const Tf2Plan& plan, Index m, LeftFactor left, RandomStream& rng) {
  const Index n = plan.n;
  if (m < 1 || m > n) throw InvalidArgument("tf2: need 1 <= m <= n");
  const Vector& sv = plan.svd.values;
  if (!(sv(m - 1) > kRankFloor))
    throw SingularMatrix("tf2: dictionary is rank deficient (singular value " + std::to_string(m) + " is " +
                         std::to_string(sv(m - 1)) + ")");

  Matrix u = plan.svd.u.leftCols(m);
  if (m < n) {
    const double tol = kDegenerateRel * sv(0);
    if (std::abs(sv(m) - sv(m - 1)) <= tol) {
      Index lo = m - 1;
      while (lo > 0 && std::abs(sv(lo - 1) - sv(m - 1)) <= tol) --lo;
      Index hi = m + 1;
      while (hi < n && std::abs(sv(hi) - sv(m - 1)) <= tol) ++hi;
      const Index width = hi - lo;
      u.middleCols(lo, m - lo) = plan.svd.u.middleCols(lo, width) * linalg::random_orthonormal(width, m - lo, rng);
    }
  }

  Matrix phi(m, n);
  for (Index i = 0; i < m; ++i) {
    const Index mode = m - 1 - i;
    phi.row(i) = u.col(mode).transpose() / sv(mode);
  }
  if (left == LeftFactor::RandomOrthonormal) phi = linalg::random_orthonormal(m, m, rng) * phi;
  return phi;
}

SensingMatrix design_tf2(const Tf2Plan& plan, Index m, LeftFactor left, RandomStream& rng) {
  return normalize_sensing(tf2_raw(plan, m, left, rng), plan.n);
}

SensingMatrix design_tf2(const Dictionary& psi, Index m, LeftFactor left, RandomStream& rng) {
  return design_tf2(plan_tf2(psi), m, left, rng);
}

SensingMatrix normalize_sensing(const Matrix& phi, Index n) {
  if (n < 1) throw InvalidArgument("normalize_sensing: n must be >= 1");
  if (!(phi.squaredNorm() > 0.0)) throw InvalidArgument("normalize_sensing: zero matrix");
  return SensingMatrix(linalg::scale_to_frobenius(phi, static_cast<double>(n)));
}

double tightness_objective(const Matrix& a) {
  const double ratio = static_cast<double>(a.rows()) / static_cast<double>(a.cols());
  Matrix q = a.transpose() * a;
  q.diagonal().array() -= ratio;
  return q.squaredNorm();
}

Matrix simplex_frame(Index m) {
  if (m < 1) throw InvalidArgument("simplex_frame: m must be >= 1");
  // Helmert basis of the sum-zero hyperplane in R^{m+1}.
  Matrix w = Matrix::Zero(m + 1, m);
  for (Index k = 1; k <= m; ++k) {
    const double c = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (Index i = 0; i < k; ++i) w(i, k - 1) = c;
    w(k, k - 1) = -static_cast<double>(k) * c;
  }
  return w.transpose() * std::sqrt(static_cast<double>(m + 1) / static_cast<double>(m));
}

SensingMatrix design(const DesignMethod& method, const Dictionary& psi, Index m, RandomStream& rng) {
  switch (method.kind) {
    case DesignKind::Gaussian:
      return design_gaussian(m, psi.n(), rng);
    case DesignKind::Tf1:
      return design_tf1(psi, gen_parseval_target(m, psi.nhat(), rng), method.alpha);
    case DesignKind::Tf2:
      return design_tf2(psi, m, method.left, rng);
  }
  throw InvalidArgument("unknown design kind");
}

}  // namespace tfs
