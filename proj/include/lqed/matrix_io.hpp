#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lqed/matrix.hpp"

namespace lqed {

// Text matrix format:
//
//   lqed-matrix v1
//   <rows> <cols>
//   <re> <im>        one line per entry, row-major
//
// Reals are written in shortest round-trip form, so write/read is exact.

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

void write_matrix(std::ostream& os, const ComplexMatrix& m);
ComplexMatrix read_matrix(std::istream& is);

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix load_matrix(const std::filesystem::path& path);

}  // namespace lqed
