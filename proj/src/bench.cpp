#include "tfsense/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "tfsense/recovery.hpp"

namespace tfs::bench {

namespace {

constexpr std::uint8_t kDictionaryTag = 1;
constexpr std::uint8_t kDesignTag = 2;
constexpr std::uint8_t kTrialTag = 3;
constexpr std::uint8_t kTrialDictionaryTag = 4;
constexpr std::uint8_t kTrialDesignTag = 5;

constexpr double kSingular = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, count) on a small pool. Each index owns its output
// slot, so the result never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Dictionary make_dictionary(const DictionaryKind& kind, Index n, Index nhat, RandomStream& rng) {
  switch (kind.kind) {
    case DictionaryKind::Kind::Gaussian: return gen_gaussian_dictionary(n, nhat, rng);
    case DictionaryKind::Kind::Canonical: return canonical_dictionary(n);
    case DictionaryKind::Kind::Specified: return gen_specified_dictionary(n, nhat, kind.ratio, rng);
  }
  throw ConfigError("unknown dictionary kind");
}

Index scaled_nhat(const DictionaryKind& kind, Index n) {
  return kind.overcomplete() ? static_cast<Index>(std::llround(1.2 * static_cast<double>(n))) : n;
}

struct TrialLoss {
  double loss = kSingular;
  bool nonconverged = false;
};

TrialLoss estimate_loss(Estimator est, const Matrix& a, const Vector& y, const SparseSignal& x, double epsilon) {
  TrialLoss out;
  try {
    RecoveryResult r;
    switch (est) {
      case Estimator::Oracle: r = oracle_ls(a, y, x.support); break;
      case Estimator::Omp: r = omp(a, y, static_cast<Index>(x.support.size()), 0.0); break;
      case Estimator::Bpdn: {
        BpdnParams p;
        p.epsilon = epsilon;
        r = bpdn(a, y, p);
        out.nonconverged = !r.converged;
        break;
      }
    }
    out.loss = (r.estimate - x.dense()).squaredNorm();
  } catch (const SingularMatrix&) {
  } catch (const Infeasible&) {
  }
  return out;
}

SweepRow base_row(const ExperimentConfig& cfg) {
  SweepRow r;
  r.experiment = to_string(cfg.experiment);
  r.dictionary_kind = cfg.dictionary_kind.label();
  r.sigma2 = cfg.sigma2;
  r.trials = cfg.trials;
  r.seed = cfg.base_seed;
  return r;
}

Vector draw_noise(Index m, double sigma2, RandomStream& rng) {
  Vector e = Vector::Zero(m);
  if (sigma2 > 0.0) {
    const double sd = std::sqrt(sigma2);
    for (Index i = 0; i < m; ++i) e(i) = sd * rng.normal();
  }
  return e;
}

Vector apply(const Matrix& a, const SparseSignal& x) {
  Vector y = Vector::Zero(a.rows());
  for (std::size_t k = 0; k < x.support.size(); ++k) y += x.values[k] * a.col(x.support[k]);
  return y;
}

// Oracle and recovery sweeps share this: one dictionary and one realization
// of every design per replica, fresh signal and noise per trial. Every design
// and estimator sees the same signals and noise.
BenchOutput fixed_dictionary_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Point {
    Index s;
    Index m;
    std::size_t m_slot;
  };
  std::vector<Index> ms;
  std::vector<Point> points;
  if (!cfg.sparsity_grid.empty()) {
    ms = {cfg.m};
    for (Index s : cfg.sparsity_grid) points.push_back({s, cfg.m, 0});
  } else {
    ms = cfg.measurement_grid;
    for (std::size_t i = 0; i < ms.size(); ++i) points.push_back({cfg.s, ms[i], i});
  }

  RandomStream dict_rng(cfg.base_seed, stream_key(kDictionaryTag, 0, 0));
  const Dictionary psi = make_dictionary(cfg.dictionary_kind, cfg.n, cfg.nhat, dict_rng);

  const std::size_t nd = cfg.designs.size();
  const std::size_t ne = cfg.estimators.size();
  // equivalent[m_slot][design]
  std::vector<std::vector<Matrix>> equivalent(ms.size());
  std::vector<std::vector<double>> energy(ms.size());
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    for (std::size_t d = 0; d < nd; ++d) {
      RandomStream rng(cfg.base_seed, stream_key(kDesignTag, mi * nd + d, 0));
      const SensingMatrix phi = design(cfg.designs[d], psi, ms[mi], rng);
      equivalent[mi].push_back(phi.matrix() * psi.matrix());
      energy[mi].push_back(equivalent[mi].back().squaredNorm());
    }
  }

  BenchOutput out;
  // rows grouped by design, then estimator, then axis point
  std::vector<SweepRow> rows(nd * ne * points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& pt = points[p];
    const double eps = cfg.bpdn_epsilon.value_or(default_bpdn_epsilon(cfg.sigma2, pt.m));
    std::vector<TrialLoss> losses(cfg.trials * nd * ne);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      RandomStream rng(cfg.base_seed, stream_key(kTrialTag, p, t));
      const SparseSignal x = gen_sparse_signal({psi.nhat(), pt.s, cfg.spikes}, rng);
      const Vector noise = draw_noise(pt.m, cfg.sigma2, rng);
      for (std::size_t d = 0; d < nd; ++d) {
        const Matrix& a = equivalent[pt.m_slot][d];
        const Vector y = apply(a, x) + noise;
        for (std::size_t e = 0; e < ne; ++e)
          losses[(d * ne + e) * cfg.trials + t] = estimate_loss(cfg.estimators[e], a, y, x, eps);
      }
    });
    for (std::size_t d = 0; d < nd; ++d) {
      for (std::size_t e = 0; e < ne; ++e) {
        std::vector<double> vals(cfg.trials);
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          const TrialLoss& tl = losses[(d * ne + e) * cfg.trials + t];
          vals[t] = tl.loss;
          out.nonconverged += tl.nonconverged;
        }
        const Summary st = summarize(vals);
        SweepRow r = base_row(cfg);
        r.design = cfg.designs[d].label();
        r.estimator = to_string(cfg.estimators[e]);
        r.s = pt.s;
        r.m = pt.m;
        r.n = cfg.n;
        r.nhat = psi.nhat();
        r.mse_mean = st.mean;
        r.mse_stderr = st.std_error;
        r.sensed_energy_mean = energy[pt.m_slot][d];
        r.singular_trials = st.skipped;
        rows[(d * ne + e) * points.size() + p] = std::move(r);
      }
    }
  }
  out.result.rows = std::move(rows);
  return out;
}

// Per-trial realization of every design for the dimension experiments. The
// mode-inversion plan is shared across trials when the dictionary is fixed.
std::vector<Matrix> trial_designs(const ExperimentConfig& cfg, const Dictionary& psi, const Tf2Plan* shared_plan,
                                  std::size_t point, std::size_t trial) {
  std::vector<Matrix> out;
  const std::size_t nd = cfg.designs.size();
  std::optional<Tf2Plan> plan;
  for (std::size_t d = 0; d < nd; ++d) {
    RandomStream rng(cfg.base_seed, stream_key(kTrialDesignTag, point * nd + d, trial));
    const DesignMethod& method = cfg.designs[d];
    if (method.kind == DesignKind::Tf2) {
      if (!shared_plan && !plan) plan = plan_tf2(psi);
      out.push_back(design_tf2(shared_plan ? *shared_plan : *plan, cfg.m, method.left, rng).matrix());
    } else {
      out.push_back(design(method, psi, cfg.m, rng).matrix());
    }
  }
  return out;
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
  Summary st;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++st.skipped;
      continue;
    }
    sum += v;
    ++st.used;
  }
  if (st.used == 0) {
    st.mean = kSingular;
    return st;
  }
  const double k = static_cast<double>(st.used);
  st.mean = sum / k;
  if (st.used > 1) {
    double ss = 0.0;
    for (double v : values)
      if (!std::isnan(v)) ss += (v - st.mean) * (v - st.mean);
    st.std_error = std::sqrt(ss / (k - 1.0) / k);
  }
  return st;
}

Summary paired_ratio(const std::vector<double>& num, const std::vector<double>& den) {
  std::vector<double> a, b;
  Summary st;
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (std::isnan(num[i]) || std::isnan(den[i])) {
      ++st.skipped;
      continue;
    }
    a.push_back(num[i]);
    b.push_back(den[i]);
  }
  st.used = a.size();
  if (a.empty()) {
    st.mean = kSingular;
    return st;
  }
  const double k = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= k;
  mb /= k;
  st.mean = ma / mb;
  if (a.size() > 1) {
    double va = 0.0, vb = 0.0, cab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
      cab += (a[i] - ma) * (b[i] - mb);
    }
    va /= k - 1.0;
    vb /= k - 1.0;
    cab /= k - 1.0;
    const double r = st.mean;
    const double var = (va + r * r * vb - 2.0 * r * cab) / (mb * mb * k);
    st.std_error = std::sqrt(std::max(var, 0.0));
  }
  return st;
}

std::uint64_t stream_key(std::uint8_t tag, std::uint64_t cell, std::uint64_t trial) {
  if (cell >= (std::uint64_t{1} << 24) || trial >= (std::uint64_t{1} << 32))
    throw InvalidArgument("stream_key: cell or trial index out of range");
  return (std::uint64_t{tag} << 56) | (cell << 32) | trial;
}

BenchOutput run_histogram(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment != Experiment::Histogram) throw ConfigError("run_histogram: experiment is not histogram");
  RandomStream dict_rng(cfg.base_seed, stream_key(kDictionaryTag, 0, 0));
  const Dictionary psi = make_dictionary(cfg.dictionary_kind, cfg.n, cfg.nhat, dict_rng);
  BenchOutput out;
  for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
    RandomStream rng(cfg.base_seed, stream_key(kDesignTag, d, 0));
    const SensingMatrix phi = design(cfg.designs[d], psi, cfg.m, rng);
    const Matrix a = phi.matrix() * psi.matrix();
    const CoherenceReport rep = coherence_report(a, cfg.histogram_bins);
    out.histograms.push_back({cfg.designs[d].label(), rep.offdiag});
    SweepRow r = base_row(cfg);
    r.design = cfg.designs[d].label();
    r.estimator = "none";
    r.m = cfg.m;
    r.n = cfg.n;
    r.nhat = cfg.nhat;
    r.trials = 1;
    r.sensed_energy_mean = rep.sensed_energy;
    out.result.rows.push_back(std::move(r));
  }
  return out;
}

BenchOutput run_oracle_sweep(const ExperimentConfig& cfg) {
  if (cfg.experiment != Experiment::OracleSweep) throw ConfigError("run_oracle_sweep: experiment is not oracle_sweep");
  return fixed_dictionary_sweep(cfg);
}

BenchOutput run_recovery_sweep(const ExperimentConfig& cfg) {
  if (cfg.experiment != Experiment::RecoverySweep)
    throw ConfigError("run_recovery_sweep: experiment is not recovery_sweep");
  return fixed_dictionary_sweep(cfg);
}

BenchOutput run_dimension_ratio(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment != Experiment::DimensionRatio)
    throw ConfigError("run_dimension_ratio: experiment is not dimension_ratio");
  const std::size_t nd = cfg.designs.size();
  const std::size_t ne = cfg.estimators.size();
  const std::size_t gauss = cfg.designs[0].kind == DesignKind::Gaussian ? 0 : 1;
  const std::size_t opt = 1 - gauss;
  const bool fixed_dictionary = cfg.dictionary_kind.kind == DictionaryKind::Kind::Canonical;

  BenchOutput out;
  std::vector<SweepRow> rows(ne * cfg.dimension_grid.size());
  for (std::size_t p = 0; p < cfg.dimension_grid.size(); ++p) {
    const Index n = cfg.dimension_grid[p];
    const Index nhat = scaled_nhat(cfg.dictionary_kind, n);
    const double eps = cfg.bpdn_epsilon.value_or(default_bpdn_epsilon(cfg.sigma2, cfg.m));
    std::optional<Dictionary> fixed;
    std::optional<Tf2Plan> fixed_plan;
    if (fixed_dictionary) {
      fixed = canonical_dictionary(n);
      fixed_plan = plan_tf2(*fixed);
    }

    std::vector<TrialLoss> losses(cfg.trials * nd * ne);
    std::vector<double> energies(cfg.trials * nd);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      std::optional<Dictionary> fresh;
      if (!fixed) {
        RandomStream drng(cfg.base_seed, stream_key(kTrialDictionaryTag, p, t));
        fresh = make_dictionary(cfg.dictionary_kind, n, nhat, drng);
      }
      const Dictionary& psi = fixed ? *fixed : *fresh;
      const auto phis = trial_designs(cfg, psi, fixed_plan ? &*fixed_plan : nullptr, p, t);

      RandomStream rng(cfg.base_seed, stream_key(kTrialTag, p, t));
      const SparseSignal x = gen_sparse_signal({nhat, cfg.s, cfg.spikes}, rng);
      const Vector noise = draw_noise(cfg.m, cfg.sigma2, rng);
      for (std::size_t d = 0; d < nd; ++d) {
        const Matrix a = fixed_dictionary ? phis[d] : Matrix(phis[d] * psi.matrix());
        energies[d * cfg.trials + t] = a.squaredNorm();
        const Vector y = apply(a, x) + noise;
        for (std::size_t e = 0; e < ne; ++e)
          losses[(d * ne + e) * cfg.trials + t] = estimate_loss(cfg.estimators[e], a, y, x, eps);
      }
    });

    std::vector<double> opt_energy(energies.begin() + static_cast<std::ptrdiff_t>(opt * cfg.trials),
                                   energies.begin() + static_cast<std::ptrdiff_t>((opt + 1) * cfg.trials));
    const Summary energy_stats = summarize(opt_energy);
    for (std::size_t e = 0; e < ne; ++e) {
      std::vector<double> num(cfg.trials), den(cfg.trials);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        num[t] = losses[(opt * ne + e) * cfg.trials + t].loss;
        den[t] = losses[(gauss * ne + e) * cfg.trials + t].loss;
        out.nonconverged += losses[(opt * ne + e) * cfg.trials + t].nonconverged;
        out.nonconverged += losses[(gauss * ne + e) * cfg.trials + t].nonconverged;
      }
      const Summary st = paired_ratio(num, den);
      SweepRow r = base_row(cfg);
      r.design = cfg.designs[opt].label() + "/" + cfg.designs[gauss].label();
      r.estimator = to_string(cfg.estimators[e]);
      r.s = cfg.s;
      r.m = cfg.m;
      r.n = n;
      r.nhat = nhat;
      r.mse_mean = st.mean;
      r.mse_stderr = st.std_error;
      r.sensed_energy_mean = energy_stats.mean;
      r.singular_trials = st.skipped;
      rows[e * cfg.dimension_grid.size() + p] = std::move(r);
    }
  }
  out.result.rows = std::move(rows);
  return out;
}

BenchOutput run_energy_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment != Experiment::EnergySweep) throw ConfigError("run_energy_sweep: experiment is not energy_sweep");
  const std::size_t nd = cfg.designs.size();
  const bool fixed_dictionary = cfg.dictionary_kind.kind == DictionaryKind::Kind::Canonical;
  BenchOutput out;
  std::vector<SweepRow> rows(nd * cfg.dimension_grid.size());
  for (std::size_t p = 0; p < cfg.dimension_grid.size(); ++p) {
    const Index n = cfg.dimension_grid[p];
    const Index nhat = scaled_nhat(cfg.dictionary_kind, n);
    std::optional<Dictionary> fixed;
    std::optional<Tf2Plan> fixed_plan;
    if (fixed_dictionary) {
      fixed = canonical_dictionary(n);
      fixed_plan = plan_tf2(*fixed);
    }
    std::vector<double> energies(cfg.trials * nd);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      std::optional<Dictionary> fresh;
      if (!fixed) {
        RandomStream drng(cfg.base_seed, stream_key(kTrialDictionaryTag, p, t));
        fresh = make_dictionary(cfg.dictionary_kind, n, nhat, drng);
      }
      const Dictionary& psi = fixed ? *fixed : *fresh;
      const auto phis = trial_designs(cfg, psi, fixed_plan ? &*fixed_plan : nullptr, p, t);
      for (std::size_t d = 0; d < nd; ++d)
        energies[d * cfg.trials + t] =
            fixed_dictionary ? phis[d].squaredNorm() : (phis[d] * psi.matrix()).squaredNorm();
    });
    for (std::size_t d = 0; d < nd; ++d) {
      const std::vector<double> vals(energies.begin() + static_cast<std::ptrdiff_t>(d * cfg.trials),
                                     energies.begin() + static_cast<std::ptrdiff_t>((d + 1) * cfg.trials));
      const Summary st = summarize(vals);
      SweepRow r = base_row(cfg);
      r.design = cfg.designs[d].label();
      r.estimator = "none";
      r.s = cfg.s;
      r.m = cfg.m;
      r.n = n;
      r.nhat = nhat;
      // The standard error column refers to the plotted quantity, here the
      // sensed energy.
      r.mse_stderr = st.std_error;
      r.sensed_energy_mean = st.mean;
      rows[d * cfg.dimension_grid.size() + p] = std::move(r);
    }
  }
  out.result.rows = std::move(rows);
  return out;
}

BenchOutput run(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::Histogram: return run_histogram(cfg);
    case Experiment::OracleSweep: return run_oracle_sweep(cfg);
    case Experiment::RecoverySweep: return run_recovery_sweep(cfg);
    case Experiment::DimensionRatio: return run_dimension_ratio(cfg);
    case Experiment::EnergySweep: return run_energy_sweep(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace tfs::bench
