#include "tfsense/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "tfsense/errors.hpp"
#include "tfsense/linalg.hpp"

namespace tfs {

namespace {

std::string describe(const Support& support) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < support.size(); ++k) os << (k ? "," : "") << support[k];
  os << '}';
  return os.str();
}

Matrix restrict_gram(const Matrix& q, const Support& support) {
  const auto s = static_cast<Index>(support.size());
  Matrix r(s, s);
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j < s; ++j) r(i, j) = q(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
  return r;
}

void check_enumeration(Index nhat, Index s, const char* what) {
  if (s < 1 || s > nhat) throw InvalidArgument(std::string(what) + ": need 1 <= s <= nhat");
  const auto count = linalg::binomial(static_cast<std::uint64_t>(nhat), static_cast<std::uint64_t>(s));
  if (count > kMaxEnumeratedSupports)
    throw ScaleGuard(std::string(what) + ": C(" + std::to_string(nhat) + ", " + std::to_string(s) +
                     ") supports exceeds the enumeration limit of 1e6");
}

}  // namespace

Matrix gram(const Matrix& a) { return a.transpose() * a; }

double mutual_coherence(const Matrix& a, bool normalize_columns) {
  if (a.cols() < 2) throw InvalidArgument("mutual_coherence: need at least two columns");
  Matrix cols = a;
  if (normalize_columns) {
    for (Index j = 0; j < cols.cols(); ++j) {
      const double norm = cols.col(j).norm();
      if (!(norm > 0.0)) throw InvalidArgument("mutual_coherence: column " + std::to_string(j) + " is zero");
      cols.col(j) /= norm;
    }
  }
  const Matrix q = gram(cols);
  double mu = 0.0;
  for (Index j = 1; j < q.cols(); ++j)
    for (Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(q(i, j)));
  return mu;
}

Histogram offdiag_histogram(const Matrix& q, Index bins) {
  if (q.rows() != q.cols()) throw InvalidArgument("offdiag_histogram: matrix is not square");
  if (bins < 1) throw InvalidArgument("offdiag_histogram: bins must be >= 1");
  const Index n = q.rows();
  double top = 0.0;
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      if (std::abs(q(i, j) - q(j, i)) > 1e-9) throw InvalidArgument("offdiag_histogram: matrix is not symmetric");
      top = std::max(top, std::abs(q(i, j)));
    }
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins + 1));
  for (Index b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = top * static_cast<double>(b) / static_cast<double>(bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      Index b = 0;
      if (top > 0.0) b = std::min<Index>(static_cast<Index>(std::abs(q(i, j)) / top * static_cast<double>(bins)), bins - 1);
      ++h.counts[static_cast<std::size_t>(b)];
    }
  return h;
}

CoherenceReport coherence_report(const Matrix& a, Index bins) {
  const Matrix q = gram(a);
  CoherenceReport r;
  r.mu = mutual_coherence(a);
  r.offdiag = offdiag_histogram(q, bins);
  r.gram_trace = q.trace();
  r.sensed_energy = a.squaredNorm();
  return r;
}

double trace_inverse_restricted(const Matrix& q, const Support& support) {
  if (support.empty()) return 0.0;
  const Matrix r = restrict_gram(q, support);
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1.0 / linalg::kMaxCondition))
    throw SingularMatrix("restricted Gram matrix on support " + describe(support) + " is singular");
  return llt.solve(Matrix::Identity(r.rows(), r.cols())).trace();
}

double oracle_mse_support(const Matrix& a, const Support& support, double sigma2) {
  for (Index j : support)
    if (j < 0 || j >= a.cols()) throw InvalidArgument("oracle_mse_support: support index out of range");
  const Matrix aj = linalg::columns(a, support);
  Support local(support.size());
  std::iota(local.begin(), local.end(), Index{0});
  try {
    return sigma2 * trace_inverse_restricted(gram(aj), local);
  } catch (const SingularMatrix&) {
    throw SingularMatrix("restricted Gram matrix on support " + describe(support) + " is singular");
  }
}

double support_averaged_trace_inverse(const Matrix& q, Index s) {
  check_enumeration(q.cols(), s, "support_averaged_trace_inverse");
  double total = 0.0;
  std::uint64_t count = 0;
  linalg::for_each_subset(q.cols(), s, [&](const Support& j) {
    total += trace_inverse_restricted(q, j);
    ++count;
  });
  return total / static_cast<double>(count);
}

ExpectedMse oracle_mse_expected_exact(const Matrix& a, Index s, double sigma2) {
  check_enumeration(a.cols(), s, "oracle_mse_expected");
  const Matrix q = gram(a);
  ExpectedMse out;
  double total = 0.0;
  linalg::for_each_subset(a.cols(), s, [&](const Support& j) {
    total += trace_inverse_restricted(q, j);
    ++out.supports;
  });
  out.value = sigma2 * total / static_cast<double>(out.supports);
  return out;
}

ExpectedMse oracle_mse_expected_sampled(const Matrix& a, Index s, double sigma2, std::uint64_t trials,
                                        RandomStream& rng) {
  if (trials < 1) throw InvalidArgument("oracle_mse_expected: trials must be >= 1");
  if (s < 1 || s > a.cols()) throw InvalidArgument("oracle_mse_expected: need 1 <= s <= nhat");
  const Matrix q = gram(a);
  const SignalModel model{a.cols(), s, SpikeKind::Rademacher};
  ExpectedMse out;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const SparseSignal x = gen_sparse_signal(model, rng);
    double v = 0.0;
    try {
      v = sigma2 * trace_inverse_restricted(q, x.support);
    } catch (const SingularMatrix&) {
      ++out.singular;
      continue;
    }
    sum += v;
    sum_sq += v * v;
    ++out.supports;
  }
  if (out.supports == 0) throw SingularMatrix("oracle_mse_expected: every sampled support was singular");
  const double k = static_cast<double>(out.supports);
  out.value = sum / k;
  if (out.supports > 1) {
    const double var = std::max(0.0, (sum_sq - k * out.value * out.value) / (k - 1.0));
    out.std_error = std::sqrt(var / k);
  }
  return out;
}

double sensed_energy(const SensingMatrix& phi, const Dictionary& psi) {
  if (phi.n() != psi.n()) throw InvalidArgument("sensed_energy: Phi and Psi dimensions do not chain");
  return (phi.matrix() * psi.matrix()).squaredNorm();
}

double sensed_snr(const SensingMatrix& phi, const Dictionary& psi, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("sensed_snr: sigma2 must be positive");
  return sensed_energy(phi, psi) / (static_cast<double>(phi.m()) * sigma2);
}

RicReport exact_ric(const Matrix& a, Index s) {
  check_enumeration(a.cols(), s, "exact_ric");
  const Matrix q = gram(a);
  RicReport out;
  out.s = s;
  out.delta = -1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  linalg::for_each_subset(a.cols(), s, [&](const Support& j) {
    es.compute(restrict_gram(q, j), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(s - 1);
    const double d = std::max(std::abs(hi - 1.0), std::abs(lo - 1.0));
    if (d > out.delta) {
      out.delta = d;
      out.argmax = j;
    }
  });
  return out;
}

BpdnConstants bpdn_error_constants(double delta_2s) {
  const double r2 = std::sqrt(2.0);
  if (!(delta_2s >= 0.0) || !(delta_2s < r2 - 1.0))
    throw InvalidArgument("bpdn_error_constants: delta_2s must lie in [0, sqrt(2) - 1)");
  const double denom = 1.0 - (r2 + 1.0) * delta_2s;
  return {(2.0 + (2.0 * r2 - 2.0) * delta_2s) / denom, 4.0 * std::sqrt(1.0 + delta_2s) / denom};
}

StripBound strip_bound(double mu, Index s, Index m, double delta) {
  StripBound b{mu, s, m, delta};
  b.vacuous = s <= 2;
  if (!(mu > 0.0) || s < 1 || m < 1) return b;
  const double sd = static_cast<double>(s);
  const double log_term = std::log1p(sd / 2.0);
  b.range_lower = std::sqrt(237.42 * mu * mu * sd * log_term) + 2.57 * sd / static_cast<double>(m);
  b.valid = b.range_lower <= delta && delta < 1.0;
  if (!b.valid) return b;
  const double gap = 0.3894 * delta - sd / static_cast<double>(m);
  const double exponent = gap * gap / (36.0 * mu * mu * sd * log_term);
  b.lower_bound = std::max(0.0, 1.0 - std::pow(sd / 2.0, -exponent));
  return b;
}

StripEstimate empirical_strip(const Matrix& a, Index s, double delta, std::uint64_t trials, RandomStream& rng) {
  if (trials < 1) throw InvalidArgument("empirical_strip: trials must be >= 1");
  if (s < 1 || s > a.cols()) throw InvalidArgument("empirical_strip: need 1 <= s <= nhat");
  const SignalModel model{a.cols(), s, SpikeKind::Rademacher};
  std::uint64_t hits = 0;
  const double norm_sq = static_cast<double>(s);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const SparseSignal x = gen_sparse_signal(model, rng);
    Vector ax = Vector::Zero(a.rows());
    for (std::size_t k = 0; k < x.support.size(); ++k) ax += x.values[k] * a.col(x.support[k]);
    if (std::abs(ax.squaredNorm() - norm_sq) <= delta * norm_sq) ++hits;
  }
  StripEstimate e;
  e.trials = trials;
  e.probability = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(trials));
  return e;
}

std::optional<double> rsnr(const Vector& f, const Vector& f_rec) {
  if (f.size() != f_rec.size()) throw InvalidArgument("rsnr: length mismatch");
  const double err = (f - f_rec).norm();
  if (err == 0.0) return std::nullopt;
  return f_rec.norm() / err;
}

double to_decibels(double ratio) { return 20.0 * std::log10(ratio); }

}  // namespace tfs
