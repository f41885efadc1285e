#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tfsense/bench.hpp"

namespace tfs::bench {

using nlohmann::json;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Histogram: return "histogram";
    case Experiment::OracleSweep: return "oracle_sweep";
    case Experiment::RecoverySweep: return "recovery_sweep";
    case Experiment::DimensionRatio: return "dimension_ratio";
    case Experiment::EnergySweep: return "energy_sweep";
  }
  return {};
}

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Oracle: return "oracle";
    case Estimator::Omp: return "omp";
    case Estimator::Bpdn: return "bpdn";
  }
  return {};
}

Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::Histogram, Experiment::OracleSweep, Experiment::RecoverySweep,
                 Experiment::DimensionRatio, Experiment::EnergySweep})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown experiment \"" + s + "\"");
}

Estimator parse_estimator(const std::string& s) {
  for (auto e : {Estimator::Oracle, Estimator::Omp, Estimator::Bpdn})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown estimator \"" + s + "\" (expected oracle, omp or bpdn)");
}

std::string DictionaryKind::label() const {
  switch (kind) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Canonical: return "canonical";
    case Kind::Specified: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, ratio);
      return "specified(" + std::string(buf, ptr) + ")";
    }
  }
  return {};
}

DictionaryKind DictionaryKind::parse(const std::string& label) {
  if (label == "gaussian") return {Kind::Gaussian, 1.0};
  if (label == "canonical") return {Kind::Canonical, 1.0};
  const std::string prefix = "specified(";
  if (label.size() > prefix.size() + 1 && label.compare(0, prefix.size(), prefix) == 0 && label.back() == ')') {
    double ratio = 0.0;
    const char* first = label.data() + prefix.size();
    const char* last = label.data() + label.size() - 1;
    auto [ptr, ec] = std::from_chars(first, last, ratio);
    if (ec == std::errc() && ptr == last) {
      if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("specified dictionary ratio must lie in (0, 1]");
      return {Kind::Specified, ratio};
    }
  }
  throw ConfigError("unknown dictionary_kind \"" + label + "\" (expected gaussian, canonical or specified(<ratio>))");
}

namespace {

bool strictly_increasing(const std::vector<Index>& g) {
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] <= g[i - 1]) return false;
  return true;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_grid(const std::vector<Index>& g, const char* name) {
  require(!g.empty(), std::string(name) + " must be non-empty");
  require(strictly_increasing(g), std::string(name) + " must be strictly increasing");
  require(g.front() >= 1, std::string(name) + " entries must be >= 1");
}

template <class T>
T get_number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) return j.get<T>();
      if (j.get<long long>() < 0) throw ConfigError(std::string("\"") + key + "\" must be non-negative");
    }
  }
  return j.get<T>();
}

std::vector<Index> get_grid(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array of integers");
  std::vector<Index> out;
  for (const auto& v : j) out.push_back(get_number<Index>(v, key));
  return out;
}

std::string get_string(const json& j, const char* key) {
  if (!j.is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
  return j.get<std::string>();
}

ExperimentConfig parse_one(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment configuration must be a JSON object");
  ExperimentConfig cfg;
  bool have_experiment = false, have_estimators = false, have_nhat = false;
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "name") cfg.name = get_string(v, k);
    else if (key == "experiment") { cfg.experiment = parse_experiment(get_string(v, k)); have_experiment = true; }
    else if (key == "m") cfg.m = get_number<Index>(v, k);
    else if (key == "n") cfg.n = get_number<Index>(v, k);
    else if (key == "nhat") { cfg.nhat = get_number<Index>(v, k); have_nhat = true; }
    else if (key == "s") cfg.s = get_number<Index>(v, k);
    else if (key == "sigma2") cfg.sigma2 = get_number<double>(v, k);
    else if (key == "sparsity_grid") cfg.sparsity_grid = get_grid(v, k);
    else if (key == "measurement_grid") cfg.measurement_grid = get_grid(v, k);
    else if (key == "dimension_grid") cfg.dimension_grid = get_grid(v, k);
    else if (key == "designs") {
      if (!v.is_array()) throw ConfigError("\"designs\" must be an array of strings");
      for (const auto& d : v) {
        try {
          cfg.designs.push_back(DesignMethod::parse(get_string(d, k)));
        } catch (const ConfigError&) {
          throw;
        } catch (const InvalidArgument& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (key == "dictionary_kind") cfg.dictionary_kind = DictionaryKind::parse(get_string(v, k));
    else if (key == "estimators") {
      if (!v.is_array()) throw ConfigError("\"estimators\" must be an array of strings");
      for (const auto& e : v) cfg.estimators.push_back(parse_estimator(get_string(e, k)));
      have_estimators = true;
    } else if (key == "trials") cfg.trials = get_number<std::uint64_t>(v, k);
    else if (key == "base_seed") cfg.base_seed = get_number<std::uint64_t>(v, k);
    else if (key == "histogram_bins") cfg.histogram_bins = get_number<Index>(v, k);
    else if (key == "spike_kind") {
      const std::string sk = get_string(v, k);
      if (sk == "rademacher") cfg.spikes = SpikeKind::Rademacher;
      else if (sk == "gaussian") cfg.spikes = SpikeKind::Gaussian;
      else throw ConfigError("\"spike_kind\" must be rademacher or gaussian");
    } else if (key == "bpdn_epsilon") cfg.bpdn_epsilon = get_number<double>(v, k);
    else if (key == "threads") cfg.threads = get_number<unsigned>(v, k);
    else throw ConfigError("unknown configuration key \"" + key + "\"");
  }
  require(have_experiment, "missing required key \"experiment\"");
  if (cfg.name.empty()) cfg.name = to_string(cfg.experiment);
  if (!have_nhat && cfg.dictionary_kind.kind == DictionaryKind::Kind::Canonical) cfg.nhat = cfg.n;
  if (!have_estimators) {
    switch (cfg.experiment) {
      case Experiment::OracleSweep:
      case Experiment::DimensionRatio: cfg.estimators = {Estimator::Oracle}; break;
      case Experiment::RecoverySweep: cfg.estimators = {Estimator::Omp, Estimator::Bpdn}; break;
      default: break;
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials must be >= 1");
  require(trials < (std::uint64_t{1} << 32), "trials must be < 2^32");
  require(std::isfinite(sigma2) && sigma2 >= 0.0, "sigma2 must be finite and >= 0");
  require(!designs.empty(), "designs must be non-empty");
  require(histogram_bins >= 1, "histogram_bins must be >= 1");
  require(!bpdn_epsilon || (std::isfinite(*bpdn_epsilon) && *bpdn_epsilon >= 0.0), "bpdn_epsilon must be >= 0");
  require(name.find_first_of("/\\") == std::string::npos && name != "." && name != "..",
          "name must be a plain file stem");
  {
    std::set<std::string> labels;
    for (const auto& d : designs) require(labels.insert(d.label()).second, "duplicate design " + d.label());
    std::set<Estimator> est(estimators.begin(), estimators.end());
    require(est.size() == estimators.size(), "duplicate estimator");
  }

  const bool canonical = dictionary_kind.kind == DictionaryKind::Kind::Canonical;
  auto fixed_dims = [&] {
    require(n >= 1, "n must be >= 1");
    require(nhat >= n, "nhat must be >= n");
    require(!canonical || nhat == n, "canonical dictionary requires nhat == n");
  };

  switch (experiment) {
    case Experiment::Histogram:
      fixed_dims();
      require(m >= 1 && m <= n, "need 1 <= m <= n");
      require(nhat >= 2, "histogram needs nhat >= 2");
      break;
    case Experiment::OracleSweep:
      fixed_dims();
      require(m >= 1 && m <= n, "need 1 <= m <= n");
      check_grid(sparsity_grid, "sparsity_grid");
      require(sparsity_grid.back() < m, "every s in sparsity_grid must be < m");
      require(estimators.size() == 1 && estimators[0] == Estimator::Oracle,
              "oracle_sweep supports only the oracle estimator");
      break;
    case Experiment::RecoverySweep:
      fixed_dims();
      require(sparsity_grid.empty() != measurement_grid.empty(),
              "recovery_sweep needs exactly one of sparsity_grid or measurement_grid");
      require(!estimators.empty(), "estimators must be non-empty");
      if (!sparsity_grid.empty()) {
        check_grid(sparsity_grid, "sparsity_grid");
        require(m >= 1 && m <= n, "need 1 <= m <= n");
        require(sparsity_grid.back() < m, "every s in sparsity_grid must be < m");
      } else {
        check_grid(measurement_grid, "measurement_grid");
        require(measurement_grid.back() <= n, "every m in measurement_grid must be <= n");
        require(s >= 1, "s must be >= 1");
        require(s < measurement_grid.front(), "s must be < every m in measurement_grid");
      }
      break;
    case Experiment::DimensionRatio: {
      check_grid(dimension_grid, "dimension_grid");
      require(m >= 1 && m <= dimension_grid.front(), "need 1 <= m <= every n in dimension_grid");
      require(s >= 1 && s < m, "need 1 <= s < m");
      require(!estimators.empty(), "estimators must be non-empty");
      int gaussians = 0;
      for (const auto& d : designs) gaussians += d.kind == DesignKind::Gaussian;
      require(designs.size() == 2 && gaussians == 1,
              "dimension_ratio needs exactly two designs: one optimized design and gaussian");
      break;
    }
    case Experiment::EnergySweep:
      check_grid(dimension_grid, "dimension_grid");
      require(m >= 1 && m <= dimension_grid.front(), "need 1 <= m <= every n in dimension_grid");
      break;
  }
}

std::vector<ExperimentConfig> parse_configs(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  std::vector<ExperimentConfig> out;
  if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(parse_one(item));
    if (out.empty()) throw ConfigError("configuration array is empty");
  } else {
    out.push_back(parse_one(doc));
  }
  std::set<std::string> names;
  for (const auto& c : out)
    if (!names.insert(c.name).second) throw ConfigError("duplicate experiment name \"" + c.name + "\"");
  return out;
}

std::vector<ExperimentConfig> load_configs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_configs(ss.str());
}

}  // namespace tfs::bench
