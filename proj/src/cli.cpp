#include "tfsense/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tfsense/bench.hpp"
#include "tfsense/design.hpp"
#include "tfsense/errors.hpp"
#include "tfsense/matrix_io.hpp"
#include "tfsense/metrics.hpp"
#include "tfsense/recovery.hpp"

namespace tfs::cli {

namespace {

// Raised for a failed run that still produced output worth keeping.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string join(const Support& support) {
  std::string out;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(support[k]);
  }
  return out;
}

bool has_zero_column(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    if (!(a.col(j).squaredNorm() > 0.0)) return true;
  return false;
}

void print_coherence(std::ostream& out, const Matrix& a) {
  if (a.cols() < 2) return;
  out << "mu " << format_real(mutual_coherence(a)) << '\n';
  if (!has_zero_column(a)) out << "mu_normalized " << format_real(mutual_coherence(a, true)) << '\n';
}

struct DesignArgs {
  std::string method;
  std::string dict;
  Index m = 0;
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  std::string left = "identity";
  std::string out;
};

void cmd_design(const DesignArgs& args, std::ostream& out) {
  const Dictionary psi(load_matrix(args.dict));
  if (args.m < 1 || args.m > psi.n())
    throw InvalidArgument("--m must lie in [1, n] with n = " + std::to_string(psi.n()));
  RandomStream rng(args.seed, 0);
  DesignMethod method;
  if (args.method == "gaussian") {
    method = DesignMethod::gaussian();
  } else if (args.method == "tf1") {
    if (!args.alpha) throw InvalidArgument("--alpha is required for --method tf1");
    method = DesignMethod::tf1(*args.alpha);
  } else {
    method = DesignMethod::tf2(args.left == "random" ? LeftFactor::RandomOrthonormal : LeftFactor::Identity);
  }
  const SensingMatrix phi = design(method, psi, args.m, rng);
  save_matrix(phi.matrix(), args.out);
  const Matrix a = phi.matrix() * psi.matrix();
  out << "sensed_energy " << format_real(a.squaredNorm()) << '\n';
  print_coherence(out, a);
}

struct AnalyzeArgs {
  std::string matrix;
  std::string dict;
  std::optional<Index> s;
};

void cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  Matrix a = load_matrix(args.matrix);
  if (!args.dict.empty()) {
    const Dictionary psi(load_matrix(args.dict));
    if (psi.n() != a.cols())
      throw InvalidArgument("matrix has " + std::to_string(a.cols()) + " columns, dictionary has " +
                            std::to_string(psi.n()) + " rows");
    a = a * psi.matrix();
  }
  print_coherence(out, a);
  out << "sensed_energy " << format_real(a.squaredNorm()) << '\n';
  const Matrix frame = a * a.transpose();
  const double scale = a.rows() ? frame.trace() / static_cast<double>(a.rows()) : 0.0;
  const double defect = (frame - scale * Matrix::Identity(a.rows(), a.rows())).norm();
  out << "parseval_defect " << format_real(defect) << '\n';
  if (args.s) {
    const RicReport ric = exact_ric(a, *args.s);
    out << "ric " << format_real(ric.delta) << '\n';
    out << "ric_support " << join(ric.argmax) << '\n';
  }
}

struct RecoverArgs {
  std::string matrix;
  std::string y;
  std::string algo;
  std::vector<Index> support;
  std::optional<Index> max_support;
  double residual_tol = 0.0;
  double epsilon = 0.0;
  Index max_iterations = BpdnParams{}.max_iterations;
  double tolerance = BpdnParams{}.tolerance;
  double penalty = BpdnParams{}.penalty;
  std::string out;
};

void cmd_recover(const RecoverArgs& args, std::ostream& out) {
  const Matrix a = load_matrix(args.matrix);
  const Matrix ym = load_matrix(args.y);
  if (ym.cols() != 1) throw InvalidArgument("--y must hold a single column");
  const Vector y = ym.col(0);
  RecoveryResult r;
  if (args.algo == "oracle") {
    Support support = args.support;
    std::sort(support.begin(), support.end());
    r = oracle_ls(a, y, support);
  } else if (args.algo == "omp") {
    r = omp(a, y, args.max_support.value_or(std::min(a.rows(), a.cols())), args.residual_tol);
  } else {
    BpdnParams p;
    p.epsilon = args.epsilon;
    p.max_iterations = args.max_iterations;
    p.tolerance = args.tolerance;
    p.penalty = args.penalty;
    r = bpdn(a, y, p);
  }
  save_matrix(r.estimate, args.out);
  out << "support " << join(r.support) << '\n';
  out << "residual_norm " << format_real(r.residual_norm) << '\n';
  out << "iterations " << r.iterations << '\n';
  if (!r.converged)
    throw RunFailure("bpdn did not converge in " + std::to_string(r.iterations) +
                     " iterations; best residual " + format_real(r.residual_norm));
}

struct BenchArgs {
  std::string config;
  std::string out;
};

void cmd_bench(const BenchArgs& args, std::ostream& out) {
  const auto configs = bench::load_configs(args.config);
  for (const auto& cfg : configs) cfg.validate();
  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  std::uint64_t nonconverged = 0;
  out << "experiment,design,estimator,s,m,n,mse_mean,mse_stderr,sensed_energy_mean,singular_trials\n";
  for (const auto& cfg : configs) {
    const bench::BenchOutput res = bench::run(cfg);
    bench::write_csv(res.result, dir / (cfg.name + ".csv"));
    if (!res.histograms.empty()) {
      const auto path = dir / (cfg.name + "_histogram.csv");
      std::ofstream hist(path);
      if (!hist) throw IoError("cannot open " + path.string() + " for writing");
      bench::write_histogram_csv(hist, res.histograms);
      if (!hist) throw IoError("write to " + path.string() + " failed");
    }
    for (const auto& r : res.result.rows)
      out << cfg.name << ',' << r.design << ',' << r.estimator << ',' << r.s << ',' << r.m << ',' << r.n << ','
          << format_real(r.mse_mean) << ',' << format_real(r.mse_stderr) << ','
          << format_real(r.sensed_energy_mean) << ',' << r.singular_trials << '\n';
    nonconverged += res.nonconverged;
  }
  out << "bpdn_nonconverged " << nonconverged << '\n';
}

struct RicArgs {
  std::string matrix;
  Index s = 1;
};

void cmd_ric(const RicArgs& args, std::ostream& out) {
  const RicReport ric = exact_ric(load_matrix(args.matrix), args.s);
  out << "ric " << format_real(ric.delta) << '\n';
  out << "ric_support " << join(ric.argmax) << '\n';
}

struct StripArgs {
  double mu = 0.0;
  Index s = 1;
  Index m = 1;
  double delta = 0.0;
  std::string matrix;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
};

void cmd_strip(const StripArgs& args, std::ostream& out) {
  const StripBound b = strip_bound(args.mu, args.s, args.m, args.delta);
  out << "valid " << (b.valid ? 1 : 0) << '\n';
  out << "vacuous " << (b.vacuous ? 1 : 0) << '\n';
  out << "range_lower " << format_real(b.range_lower) << '\n';
  out << "lower_bound " << format_real(b.lower_bound) << '\n';
  out << "eta " << format_real(b.eta()) << '\n';
  if (!args.matrix.empty()) {
    RandomStream rng(args.seed, 0);
    const StripEstimate e = empirical_strip(load_matrix(args.matrix), args.s, args.delta, args.trials, rng);
    out << "empirical " << format_real(e.probability) << '\n';
    out << "empirical_stderr " << format_real(e.std_error) << '\n';
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tight-frame sensing matrix design and evaluation"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  DesignArgs design_args;
  auto* design_cmd = app.add_subcommand("design", "Build a normalized sensing matrix for a dictionary");
  design_cmd->add_option("--method", design_args.method)->required()->check(CLI::IsMember({"gaussian", "tf1", "tf2"}));
  design_cmd->add_option("--dict", design_args.dict)->required();
  design_cmd->add_option("--m", design_args.m)->required();
  design_cmd->add_option("--alpha", design_args.alpha);
  design_cmd->add_option("--seed", design_args.seed);
  design_cmd->add_option("--left", design_args.left)->check(CLI::IsMember({"identity", "random"}));
  design_cmd->add_option("--out", design_args.out)->required();

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Coherence, energy, tightness and RIC of a matrix");
  analyze_cmd->add_option("--matrix", analyze_args.matrix)->required();
  analyze_cmd->add_option("--dict", analyze_args.dict);
  analyze_cmd->add_option("--s", analyze_args.s);

  RecoverArgs recover_args;
  auto* recover_cmd = app.add_subcommand("recover", "Recover a sparse vector from y = A x + noise");
  recover_cmd->add_option("--matrix", recover_args.matrix)->required();
  recover_cmd->add_option("--y", recover_args.y)->required();
  recover_cmd->add_option("--algo", recover_args.algo)->required()->check(CLI::IsMember({"oracle", "omp", "bpdn"}));
  recover_cmd->add_option("--support", recover_args.support, "oracle: true support");
  recover_cmd->add_option("--max-support", recover_args.max_support, "omp: atom budget");
  recover_cmd->add_option("--residual-tol", recover_args.residual_tol, "omp: stop once ||r|| <= tol");
  recover_cmd->add_option("--epsilon", recover_args.epsilon, "bpdn: residual budget");
  recover_cmd->add_option("--max-iter", recover_args.max_iterations, "bpdn");
  recover_cmd->add_option("--tol", recover_args.tolerance, "bpdn");
  recover_cmd->add_option("--penalty", recover_args.penalty, "bpdn");
  recover_cmd->add_option("--out", recover_args.out)->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run experiments from a JSON config");
  bench_cmd->add_option("--config", bench_args.config)->required();
  bench_cmd->add_option("--out", bench_args.out)->required();

  RicArgs ric_args;
  auto* ric_cmd = app.add_subcommand("ric", "Exact restricted isometry constant");
  ric_cmd->add_option("--matrix", ric_args.matrix)->required();
  ric_cmd->add_option("--s", ric_args.s)->required();

  StripArgs strip_args;
  auto* strip_cmd = app.add_subcommand("strip", "Statistical RIP bound, optionally with a Monte Carlo estimate");
  strip_cmd->add_option("--mu", strip_args.mu)->required();
  strip_cmd->add_option("--s", strip_args.s)->required();
  strip_cmd->add_option("--m", strip_args.m)->required();
  strip_cmd->add_option("--delta", strip_args.delta)->required();
  strip_cmd->add_option("--matrix", strip_args.matrix);
  strip_cmd->add_option("--trials", strip_args.trials);
  strip_cmd->add_option("--seed", strip_args.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*design_cmd) cmd_design(design_args, out);
    else if (*analyze_cmd) cmd_analyze(analyze_args, out);
    else if (*recover_cmd) cmd_recover(recover_args, out);
    else if (*bench_cmd) cmd_bench(bench_args, out);
    else if (*ric_cmd) cmd_ric(ric_args, out);
    else if (*strip_cmd) cmd_strip(strip_args, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace tfs::cli
