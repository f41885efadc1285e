#include "tfsense/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfsense/errors.hpp"
#include "tfsense/linalg.hpp"

namespace tfs {

namespace {

void check_system(const Matrix& a, const Vector& y, const char* what) {
  if (y.size() != a.rows())
    throw InvalidArgument(std::string(what) + ": y has length " + std::to_string(y.size()) + ", A has " +
                          std::to_string(a.rows()) + " rows");
}

// Least squares on the columns in `support`, guarded by the restricted
// Gram condition number.
Vector fit_on_support(const Matrix& a, const Vector& y, const Support& support, const char* what) {
  const Matrix aj = linalg::columns(a, support);
  Eigen::LLT<Matrix> llt(aj.transpose() * aj);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1.0 / linalg::kMaxCondition))
    throw SingularMatrix(std::string(what) + ": restricted Gram matrix is singular");
  return aj.householderQr().solve(y);
}

Vector scatter(Index nhat, const Support& support, const Vector& values) {
  Vector x = Vector::Zero(nhat);
  for (std::size_t k = 0; k < support.size(); ++k) x(support[k]) = values(static_cast<Index>(k));
  return x;
}

// Euclidean projection onto {x : ||Ax - y|| <= eps} through the thin SVD
// of A. Components of y outside range(A) contribute a fixed residual.
class ResidualBall {
 public:
  ResidualBall(const Matrix& a, const Vector& y, double eps) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double floor = sv.size() ? sv(0) * 1e-12 : 0.0;
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > floor) ++rank;
    s_ = sv.head(rank);
    v_ = svd.matrixV().leftCols(rank);
    const Matrix u = svd.matrixU().leftCols(rank);
    yt_ = u.transpose() * y;
    const double outside = (y - u * yt_).norm();
    const double slack = 1e-9 * std::max(1.0, y.norm());
    if (outside > eps + slack)
      throw Infeasible("bpdn: no x satisfies ||Ax - y|| <= " + std::to_string(eps) +
                       " (distance of y from range(A) is " + std::to_string(outside) + ")");
    budget_ = eps * eps - outside * outside;
  }

  Vector project(const Vector& v) const {
    const Vector w = v_.transpose() * v;
    const Vector g = s_.cwiseProduct(w) - yt_;
    if (budget_ > 0.0 && g.squaredNorm() <= budget_) return v;
    Vector c(w.size());
    if (budget_ <= 0.0) {
      c = yt_.cwiseQuotient(s_);
    } else {
      const double lambda = multiplier(g);
      for (Index i = 0; i < w.size(); ++i) c(i) = w(i) - lambda * s_(i) * g(i) / (1.0 + lambda * s_(i) * s_(i));
    }
    return v + v_ * (c - w);
  }

 private:
  double residual_sq(const Vector& g, double lambda) const {
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
      const double r = g(i) / (1.0 + lambda * s_(i) * s_(i));
      acc += r * r;
    }
    return acc;
  }

  // Smallest lambda with residual_sq(lambda) <= budget, from above.
  double multiplier(const Vector& g) const {
    double lo = 0.0;
    double hi = 1.0 / (s_(s_.size() - 1) * s_(s_.size() - 1));
    while (residual_sq(g, hi) > budget_) {
      lo = hi;
      hi *= 4.0;
      if (!std::isfinite(hi)) return std::numeric_limits<double>::max();
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (residual_sq(g, mid) > budget_ ? lo : hi) = mid;
    }
    return hi;
  }

  Vector s_;
  Matrix v_;
  Vector yt_;
  double budget_ = 0.0;
};

}  // namespace

RecoveryResult oracle_ls(const Matrix& a, const Vector& y, const Support& support) {
  check_system(a, y, "oracle_ls");
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= a.cols()) throw InvalidArgument("oracle_ls: support index out of range");
    if (k && support[k] <= support[k - 1]) throw InvalidArgument("oracle_ls: support must be strictly increasing");
  }
  RecoveryResult r;
  r.support = support;
  r.estimate = support.empty() ? Vector(Vector::Zero(a.cols()))
                               : scatter(a.cols(), support, fit_on_support(a, y, support, "oracle_ls"));
  r.iterations = 1;
  r.residual_norm = (a * r.estimate - y).norm();
  return r;
}

RecoveryResult omp(const Matrix& a, const Vector& y, Index max_support, double residual_tol) {
  check_system(a, y, "omp");
  if (max_support < 0 || max_support > a.rows() || max_support > a.cols())
    throw InvalidArgument("omp: max_support must lie in [0, min(m, nhat)]");
  if (!(residual_tol >= 0.0)) throw InvalidArgument("omp: residual_tol must be >= 0");
  Vector inv_norm(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (!(norm > 0.0)) throw InvalidArgument("omp: column " + std::to_string(j) + " is zero");
    inv_norm(j) = 1.0 / norm;
  }

  RecoveryResult out;
  Support chosen;
  std::vector<bool> used(static_cast<std::size_t>(a.cols()), false);
  Vector residual = y;
  Vector coeffs;
  while (static_cast<Index>(chosen.size()) < max_support && residual.norm() > residual_tol) {
    const Vector corr = (a.transpose() * residual).cwiseAbs().cwiseProduct(inv_norm);
    Index best = -1;
    double best_val = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
      if (!used[static_cast<std::size_t>(j)] && corr(j) > best_val) {
        best = j;
        best_val = corr(j);
      }
    if (best < 0) break;  // residual orthogonal to every remaining atom
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    coeffs = fit_on_support(a, y, chosen, "omp");
    residual = y - linalg::columns(a, chosen) * coeffs;
    ++out.iterations;
  }

  out.estimate = Vector::Zero(a.cols());
  for (std::size_t k = 0; k < chosen.size(); ++k) out.estimate(chosen[k]) = coeffs(static_cast<Index>(k));
  out.support = chosen;
  std::sort(out.support.begin(), out.support.end());
  out.residual_norm = residual.norm();
  return out;
}

RecoveryResult bpdn(const Matrix& a, const Vector& y, const BpdnParams& params) {
  check_system(a, y, "bpdn");
  if (!(params.epsilon >= 0.0)) throw InvalidArgument("bpdn: epsilon must be >= 0");
  if (!(params.tolerance > 0.0)) throw InvalidArgument("bpdn: tolerance must be > 0");
  if (params.max_iterations < 1) throw InvalidArgument("bpdn: max_iterations must be >= 1");
  if (!(params.penalty > 0.0)) throw InvalidArgument("bpdn: penalty must be > 0");

  const Index nhat = a.cols();
  RecoveryResult out;
  if (a.rows() == 0 || !(a.squaredNorm() > 0.0)) {
    if (y.norm() > params.epsilon) throw Infeasible("bpdn: A is zero and ||y|| exceeds epsilon");
    out.estimate = Vector::Zero(nhat);
    out.residual_norm = y.norm();
    return out;
  }
  const ResidualBall ball(a, y, params.epsilon);
  const double shrink = 1.0 / params.penalty;

  Vector x = Vector::Zero(nhat);
  Vector u = Vector::Zero(nhat);
  Vector d = Vector::Zero(nhat);
  Vector best = x;
  double best_l1 = std::numeric_limits<double>::infinity();
  out.converged = false;
  for (Index it = 1; it <= params.max_iterations; ++it) {
    x = ball.project(u - d);
    const Vector z = x + d;
    const Vector u_next = z.cwiseSign().cwiseProduct((z.cwiseAbs().array() - shrink).max(0.0).matrix());
    d += x - u_next;
    const double step = (u_next - u).norm();
    const double gap = (x - u_next).norm();
    u = u_next;
    out.iterations = it;
    const double l1 = x.lpNorm<1>();
    if (l1 < best_l1) {
      best_l1 = l1;
      best = x;
    }
    const double scale = std::max(1.0, u.norm());
    if (step <= params.tolerance * scale && gap <= params.tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  out.estimate = out.converged ? x : best;
  for (Index j = 0; j < nhat; ++j)
    if (u(j) != 0.0) out.support.push_back(j);
  out.residual_norm = (a * out.estimate - y).norm();
  return out;
}

double default_bpdn_epsilon(double sigma2, Index m) {
  const double md = static_cast<double>(m);
  return std::sqrt(sigma2 * (md + 2.0 * std::sqrt(2.0 * md)));
}

}  // namespace tfs
