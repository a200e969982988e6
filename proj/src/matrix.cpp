#include "lqed/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lqed {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shape " + a.shape_string() + " vs " +
                            b.shape_string());
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionMismatch("ComplexMatrix: " + std::to_string(entries_.size()) +
                            " entries for shape " + shape_string());
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

std::string ComplexMatrix::shape_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

ComplexMatrix mat_add(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "mat_add");
  ComplexMatrix out = a;
  auto dst = out.entries();
  auto src = b.entries();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  return out;
}

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  multiply_accumulate(a, b, c);
  return c;
}

void multiply_accumulate(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    throw DimensionMismatch("multiply: " + a.shape_string() + " * " + b.shape_string() +
                            " into " + c.shape_string());
  }
  const std::size_t n_rows = a.rows();
  const std::size_t n_inner = a.cols();
  const std::size_t n_cols = b.cols();
  // std::complex is layout-compatible with double[2]; the explicit real
  // arithmetic keeps the inner loop vectorizable.
  const double* pa = reinterpret_cast<const double*>(a.entries().data());
  const double* pb = reinterpret_cast<const double*>(b.entries().data());
  double* pc = reinterpret_cast<double*>(c.entries().data());
  for (std::size_t i = 0; i < n_rows; ++i) {
    double* crow = pc + 2 * i * n_cols;
    for (std::size_t k = 0; k < n_inner; ++k) {
      const double ar = pa[2 * (i * n_inner + k)];
      const double ai = pa[2 * (i * n_inner + k) + 1];
      const double* brow = pb + 2 * k * n_cols;
      for (std::size_t j = 0; j < n_cols; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
}

void axpy(Complex alpha, const ComplexMatrix& x, ComplexMatrix& y) {
  require_same_shape(x, y, "axpy");
  auto src = x.entries();
  auto dst = y.entries();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += alpha * src[k];
}

ComplexMatrix scaled(const ComplexMatrix& m, Complex factor) {
  ComplexMatrix out = m;
  for (auto& v : out.entries()) v *= factor;
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
  return out;
}

Complex trace(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("trace: non-square " + m.shape_string());
  // Neumaier-compensated so trace drift checks are not dominated by summation error.
  double sum_re = 0.0, comp_re = 0.0, sum_im = 0.0, comp_im = 0.0;
  auto add = [](double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  for (std::size_t i = 0; i < m.rows(); ++i) {
    add(sum_re, comp_re, m(i, i).real());
    add(sum_im, comp_im, m(i, i).imag());
  }
  return {sum_re + comp_re, sum_im + comp_im};
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("hermiticity_defect: non-square " + m.shape_string());
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c)
      worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
  return worst;
}

double max_abs(const ComplexMatrix& m) {
  double worst = 0.0;
  for (const auto& v : m.entries()) worst = std::max(worst, std::abs(v));
  return worst;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto x = a.entries();
  auto y = b.entries();
  for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
  return worst;
}

// ---------------------------------------------------------------------------

BlockPartition::BlockPartition(std::size_t global_dim, int grid_side)
    : global_dim_(global_dim), grid_side_(grid_side) {
  if (grid_side < 1) throw std::invalid_argument("BlockPartition: grid_side must be >= 1");
  if (static_cast<std::size_t>(grid_side) > global_dim) {
    throw std::invalid_argument("BlockPartition: grid_side " + std::to_string(grid_side) +
                                " exceeds dimension " + std::to_string(global_dim));
  }
  const auto side = static_cast<std::size_t>(grid_side);
  const std::size_t base = global_dim / side;
  const std::size_t remainder = global_dim % side;
  extents_.resize(side);
  offsets_.resize(side);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < side; ++b) {
    extents_[b] = base + (b < remainder ? 1 : 0);
    offsets_[b] = offset;
    offset += extents_[b];
  }
}

int BlockPartition::block_of(std::size_t index) const {
  if (index >= global_dim_) {
    throw std::out_of_range("BlockPartition: index " + std::to_string(index) +
                            " outside dimension " + std::to_string(global_dim_));
  }
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

std::vector<MatrixBlock> partition(const ComplexMatrix& m, int grid_side) {
  if (!m.is_square()) throw DimensionMismatch("partition: non-square " + m.shape_string());
  const BlockPartition layout(m.rows(), grid_side);
  std::vector<MatrixBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(grid_side * grid_side));
  for (int br = 0; br < grid_side; ++br) {
    for (int bc = 0; bc < grid_side; ++bc) {
      ComplexMatrix block(layout.extent(br), layout.extent(bc));
      for (std::size_t r = 0; r < block.rows(); ++r) {
        auto src = m.row(layout.offset(br) + r).subspan(layout.offset(bc), block.cols());
        std::copy(src.begin(), src.end(), block.row(r).begin());
      }
      blocks.push_back({{br, bc}, std::move(block)});
    }
  }
  return blocks;
}

ComplexMatrix reassemble(std::span<const MatrixBlock> blocks, const BlockPartition& layout) {
  const int side = layout.grid_side();
  const auto expected = static_cast<std::size_t>(side * side);
  if (blocks.size() != expected) {
    throw std::invalid_argument("reassemble: expected " + std::to_string(expected) +
                                " blocks, got " + std::to_string(blocks.size()));
  }
  std::vector<bool> seen(expected, false);
  ComplexMatrix m(layout.global_dim(), layout.global_dim());
  for (const auto& blk : blocks) {
    const auto [br, bc] = blk.coord;
    if (br < 0 || bc < 0 || br >= side || bc >= side) {
      throw std::invalid_argument("reassemble: block coordinate out of grid");
    }
    const auto slot = static_cast<std::size_t>(br * side + bc);
    if (seen[slot]) {
      throw std::invalid_argument("reassemble: duplicate block (" + std::to_string(br) + "," +
                                  std::to_string(bc) + ")");
    }
    seen[slot] = true;
    if (blk.data.rows() != layout.extent(br) || blk.data.cols() != layout.extent(bc)) {
      throw DimensionMismatch("reassemble: block (" + std::to_string(br) + "," +
                              std::to_string(bc) + ") has shape " + blk.data.shape_string());
    }
    for (std::size_t r = 0; r < blk.data.rows(); ++r) {
      auto src = blk.data.row(r);
      std::copy(src.begin(), src.end(),
                m.row(layout.offset(br) + r).begin() + static_cast<std::ptrdiff_t>(layout.offset(bc)));
    }
  }
  return m;
}

}  // namespace lqed
