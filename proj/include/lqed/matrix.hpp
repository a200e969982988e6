#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqed {

using Complex = std::complex<double>;

/// Thrown when operand shapes are incompatible.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense complex matrix stored row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix identity(std::size_t dim);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<Complex> entries() { return entries_; }
  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const Complex> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  std::string shape_string() const;

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix mat_add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b);

/// c += a * b. The accumulation order is fixed (row, then inner index, then column).
void multiply_accumulate(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c);

/// y += alpha * x
void axpy(Complex alpha, const ComplexMatrix& x, ComplexMatrix& y);

ComplexMatrix scaled(const ComplexMatrix& m, Complex factor);
ComplexMatrix adjoint(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);

/// max_{r,c} |m(r,c) - conj(m(c,r))|
double hermiticity_defect(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Block partitioning over a square processor grid.

struct BlockCoord {
  int row = 0;
  int col = 0;
  bool operator==(const BlockCoord&) const = default;
};

/// Splits a global dimension into grid_side contiguous ranges. When grid_side
/// does not divide the dimension the first (dim mod grid_side) ranges get one
/// extra index.
class BlockPartition {
 public:
  BlockPartition(std::size_t global_dim, int grid_side);

  std::size_t global_dim() const { return global_dim_; }
  int grid_side() const { return grid_side_; }

  std::size_t extent(int block) const { return extents_[static_cast<std::size_t>(block)]; }
  std::size_t offset(int block) const { return offsets_[static_cast<std::size_t>(block)]; }
  std::span<const std::size_t> extents() const { return extents_; }

  /// Block holding a global index.
  int block_of(std::size_t index) const;
  std::size_t local_index(std::size_t index) const { return index - offset(block_of(index)); }

  bool operator==(const BlockPartition&) const = default;

 private:
  std::size_t global_dim_;
  int grid_side_;
  std::vector<std::size_t> extents_;
  std::vector<std::size_t> offsets_;
};

struct MatrixBlock {
  BlockCoord coord;
  ComplexMatrix data;
};

/// Splits a square matrix into grid_side x grid_side blocks, row-major in block coordinates.
std::vector<MatrixBlock> partition(const ComplexMatrix& m, int grid_side);
ComplexMatrix reassemble(std::span<const MatrixBlock> blocks, const BlockPartition& layout);

}  // namespace lqed
