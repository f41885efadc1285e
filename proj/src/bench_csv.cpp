#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "tfsense/bench.hpp"
#include "tfsense/matrix_io.hpp"

namespace tfs::bench {

namespace {

constexpr std::array<const char*, 15> kColumns = {
    "experiment", "design", "dictionary_kind", "estimator",          "s",
    "m",          "n",      "nhat",            "sigma2",             "trials",
    "mse_mean",   "mse_stderr", "sensed_energy_mean", "singular_trials", "seed"};

const std::string& checked(const std::string& field) {
  if (field.find_first_of(",\"\n\r") != std::string::npos)
    throw FormatError("CSV field \"" + field + "\" contains a separator");
  return field;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_int(const std::string& s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError(where + ": bad integer \"" + s + "\"");
  return v;
}

double parse_real(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError(where + ": bad number \"" + s + "\"");
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << checked(r.experiment) << ',' << checked(r.design) << ',' << checked(r.dictionary_kind) << ','
        << checked(r.estimator) << ',' << r.s << ',' << r.m << ',' << r.n << ',' << r.nhat << ','
        << format_real(r.sigma2) << ',' << r.trials << ',' << format_real(r.mse_mean) << ','
        << format_real(r.mse_stderr) << ',' << format_real(r.sensed_energy_mean) << ',' << r.singular_trials
        << ',' << r.seed << '\n';
  }
}

SweepResult read_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line == "\r") throw FormatError(origin + ": empty file, no header");
  const auto names = split(line);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!pos.emplace(names[i], i).second) throw FormatError(origin + ": duplicate column \"" + names[i] + "\"");
  }
  for (const char* col : kColumns)
    if (!pos.count(col)) throw FormatError(origin + ": missing column \"" + std::string(col) + "\"");
  if (names.size() != kColumns.size()) {
    for (const auto& nm : names) {
      bool known = false;
      for (const char* col : kColumns) known = known || nm == col;
      if (!known) throw FormatError(origin + ": unexpected column \"" + nm + "\"");
    }
  }

  SweepResult result;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    const std::string where = origin + ":" + std::to_string(lineno);
    if (f.size() != names.size())
      throw FormatError(where + ": expected " + std::to_string(names.size()) + " fields, found " +
                        std::to_string(f.size()));
    auto at = [&](const char* col) -> const std::string& { return f[pos.at(col)]; };
    SweepRow r;
    r.experiment = at("experiment");
    r.design = at("design");
    r.dictionary_kind = at("dictionary_kind");
    r.estimator = at("estimator");
    r.s = parse_int<Index>(at("s"), where);
    r.m = parse_int<Index>(at("m"), where);
    r.n = parse_int<Index>(at("n"), where);
    r.nhat = parse_int<Index>(at("nhat"), where);
    r.sigma2 = parse_real(at("sigma2"), where);
    r.trials = parse_int<std::uint64_t>(at("trials"), where);
    r.mse_mean = parse_real(at("mse_mean"), where);
    r.mse_stderr = parse_real(at("mse_stderr"), where);
    r.sensed_energy_mean = parse_real(at("sensed_energy_mean"), where);
    r.singular_trials = parse_int<std::uint64_t>(at("singular_trials"), where);
    r.seed = parse_int<std::uint64_t>(at("seed"), where);
    result.rows.push_back(std::move(r));
  }
  return result;
}

void write_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(out, result);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

SweepResult read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramSeries>& series) {
  out << kHistogramHeader << '\n';
  for (const auto& s : series) {
    const auto& h = s.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      out << checked(s.design) << ',' << format_real(h.edges[b]) << ',' << format_real(h.edges[b + 1]) << ','
          << h.counts[b] << '\n';
  }
}

}  // namespace tfs::bench
