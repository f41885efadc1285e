#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tfsense/model.hpp"

namespace tfs {

Matrix gram(const Matrix& a);

/// max_{i != j} |a_i^T a_j|. With `normalize_columns` the columns are scaled
/// to unit norm first.
double mutual_coherence(const Matrix& a, bool normalize_columns = false);

struct Histogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::uint64_t> counts;  // bins entries
};

/// Histogram of |q_ij| over the strict upper triangle, uniform bins on
/// [0, max |q_ij|]; bins are left-closed, the last one is closed.
Histogram offdiag_histogram(const Matrix& q, Index bins);

struct CoherenceReport {
  double mu = 0.0;
  Histogram offdiag;
  double gram_trace = 0.0;
  double sensed_energy = 0.0;
};
CoherenceReport coherence_report(const Matrix& a, Index bins);

/// Tr((E_J^T Q E_J)^-1) for a Gram matrix Q.
double trace_inverse_restricted(const Matrix& q, const Support& support);

/// sigma2 * Tr((A_J^T A_J)^-1): MSE of least squares on a known support.
double oracle_mse_support(const Matrix& a, const Support& support, double sigma2);

struct ExpectedMse {
  double value = 0.0;
  double std_error = 0.0;           // zero in exact mode
  std::uint64_t supports = 0;       // supports that entered the mean
  std::uint64_t singular = 0;       // sampled mode only
};

/// Mean of oracle_mse_support over every size-s support. Requires
/// C(nhat, s) <= 1e6; any singular support aborts with SingularMatrix.
ExpectedMse oracle_mse_expected_exact(const Matrix& a, Index s, double sigma2);
/// Mean over `trials` uniformly drawn supports. Singular supports are
/// skipped and counted.
ExpectedMse oracle_mse_expected_sampled(const Matrix& a, Index s, double sigma2, std::uint64_t trials,
                                        RandomStream& rng);

/// Mean of Tr((E_J^T Q E_J)^-1) over all size-s supports of a Gram matrix.
double support_averaged_trace_inverse(const Matrix& q, Index s);

double sensed_energy(const SensingMatrix& phi, const Dictionary& psi);
/// ||Phi Psi||_F^2 / (m sigma2).
double sensed_snr(const SensingMatrix& phi, const Dictionary& psi, double sigma2);

struct RicReport {
  Index s = 0;
  double delta = 0.0;
  Support argmax;
};

inline constexpr std::uint64_t kMaxEnumeratedSupports = 1'000'000;

/// Restricted isometry constant of order s by enumerating every support.
RicReport exact_ric(const Matrix& a, Index s);

struct BpdnConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
/// Error-bound constants of l1 recovery for delta_2s < sqrt(2) - 1.
BpdnConstants bpdn_error_constants(double delta_2s);

struct StripBound {
  double mu = 0.0;
  Index s = 0;
  Index m = 0;
  double delta = 0.0;
  bool valid = false;
  /// s <= 2: the bound carries no information (lower_bound clamps to 0).
  bool vacuous = false;
  double lower_bound = 0.0;
  double range_lower = 0.0;  // smallest admissible delta

  /// Failure probability eta of the statistical RIP statement.
  double eta() const { return 1.0 - lower_bound; }
};
/// Probability bound for the restricted isometry of a unit-norm tight frame
/// on random s-sparse supports.
StripBound strip_bound(double mu, Index s, Index m, double delta);

struct StripEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};
/// Fraction of random s-sparse unit-magnitude sign patterns x with
/// | ||Ax||^2 - ||x||^2 | <= delta ||x||^2.
StripEstimate empirical_strip(const Matrix& a, Index s, double delta, std::uint64_t trials, RandomStream& rng);

/// ||f_rec|| / ||f - f_rec||; nullopt signals perfect reconstruction.
std::optional<double> rsnr(const Vector& f, const Vector& f_rec);
double to_decibels(double ratio);

}  // namespace tfs
