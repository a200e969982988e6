#include "lqed/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace lqed {

namespace {
constexpr const char* kMagic = "lqed-matrix";
constexpr const char* kVersion = "v1";
}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, result.ptr};
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

void write_matrix(std::ostream& os, const ComplexMatrix& m) {
  os << kMagic << ' ' << kVersion << '\n' << m.rows() << ' ' << m.cols() << '\n';
  for (const auto& v : m.entries()) os << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
}

ComplexMatrix read_matrix(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != kMagic || version != kVersion) {
    throw std::runtime_error("read_matrix: missing 'lqed-matrix v1' header");
  }
  std::size_t rows = 0, cols = 0;
  if (!(is >> rows >> cols)) throw std::runtime_error("read_matrix: bad shape line");
  std::vector<Complex> entries;
  entries.reserve(rows * cols);
  std::string re, im;
  for (std::size_t k = 0; k < rows * cols; ++k) {
    if (!(is >> re >> im)) {
      throw std::runtime_error("read_matrix: truncated after " + std::to_string(k) + " entries");
    }
    entries.emplace_back(parse_double(re), parse_double(im));
  }
  return {rows, cols, std::move(entries)};
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_matrix(os, m);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_matrix(is);
}

}  // namespace lqed
