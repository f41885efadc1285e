#include "tfsense/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tfsense/errors.hpp"

namespace tfs {

std::string format_real(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in, const std::string& origin) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError(origin + ": missing header line");
  std::istringstream hs(header);
  long long rows = 0, cols = 0;
  std::string extra;
  if (!(hs >> rows >> cols) || (hs >> extra))
    throw FormatError(origin + ": malformed header \"" + header + "\" (expected \"<rows> <cols>\")");
  if (rows < 1 || cols < 1) throw FormatError(origin + ": header dimensions must be positive");

  const long long expected = rows * cols;
  Matrix m(rows, cols);
  long long count = 0;
  std::string token;
  while (in >> token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw FormatError(origin + ": bad entry \"" + token + "\"");
    if (!std::isfinite(v)) throw FormatError(origin + ": non-finite entry");
    if (count < expected) m(count / cols, count % cols) = v;
    ++count;
  }
  if (count != expected)
    throw FormatError(origin + ": header declares " + std::to_string(expected) + " entries, found " +
                      std::to_string(count));
  return m;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix(out, m);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_matrix(in, path.string());
}

}  // namespace tfs
