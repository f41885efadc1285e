#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tfsense/model.hpp"

namespace tfs {

// Text layout: "<rows> <cols>" on the first line, then rows*cols
// whitespace-separated decimal entries in row-major order, 17 significant
// digits each. Vectors are stored as single-column matrices.

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in, const std::string& origin = "<stream>");

void save_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

/// "%.17g": enough digits for an exact double round trip.
std::string format_real(double v);

}  // namespace tfs
