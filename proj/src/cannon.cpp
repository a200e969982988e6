#include "lqed/cannon.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lqed {

namespace {

constexpr int kTagAlignA = 0;
constexpr int kTagAlignB = 1;
// Shift round r uses tags kTagShift + 2r (A) and kTagShift + 2r + 1 (B).
constexpr int kTagShift = 2;

void require_compatible(const DistributedMatrix& a, const DistributedMatrix& b, const ProcessorGrid& grid,
                        const char* op) {
  if (!(a.layout() == b.layout())) {
    throw DimensionMismatch(std::string(op) + ": partition mismatch (" + std::to_string(a.dim()) + " on side " +
                            std::to_string(a.grid_side()) + " vs " + std::to_string(b.dim()) + " on side " +
                            std::to_string(b.grid_side()) + ")");
  }
  if (a.grid_side() != grid.config().side()) {
    throw std::invalid_argument(std::string(op) + ": matrix partitioned for side " +
                                std::to_string(a.grid_side()) + ", grid side is " +
                                std::to_string(grid.config().side()));
  }
}

ComplexMatrix to_block(Message&& msg) { return {msg.rows, msg.cols, std::move(msg.payload)}; }

}  // namespace

DistributedMatrix cannon_multiply(const DistributedMatrix& a, const DistributedMatrix& b, ProcessorGrid& grid,
                                  Phase phase) {
  require_compatible(a, b, grid, "cannon_multiply");
  DistributedMatrix c(a.layout());
  const int side = grid.config().side();

  grid.run(phase, [&](Processor& proc) {
    const GridConfig& g = proc.grid();
    const GridCoord me = proc.coord();
    const int rank = proc.rank();

    // Initial skew: A_{i,j} goes left by i, B_{i,j} up by j.
    ComplexMatrix a_blk;
    ComplexMatrix b_blk;
    const GridCoord a_dst = align_destination_a(me, side);
    const GridCoord b_dst = align_destination_b(me, side);
    if (!(a_dst == me)) proc.send(g.rank_of(a_dst), kTagAlignA, a.block(rank), CommKind::align_a);
    if (!(b_dst == me)) proc.send(g.rank_of(b_dst), kTagAlignB, b.block(rank), CommKind::align_b);
    const GridCoord a_src = g.wrap(me.row, me.col + me.row);
    const GridCoord b_src = g.wrap(me.row + me.col, me.col);
    a_blk = (a_src == me) ? a.block(rank) : to_block(proc.receive(g.rank_of(a_src), kTagAlignA));
    b_blk = (b_src == me) ? b.block(rank) : to_block(proc.receive(g.rank_of(b_src), kTagAlignB));

    ComplexMatrix& acc = c.block(rank);
    const int left = g.rank_of(shift_destination(ShiftDirection::left, me, side));
    const int right = g.rank_of(shift_source(ShiftDirection::left, me, side));
    const int up = g.rank_of(shift_destination(ShiftDirection::up, me, side));
    const int down = g.rank_of(shift_source(ShiftDirection::up, me, side));
    for (int round = 0; round < side; ++round) {
      proc.compute([&] { multiply_accumulate(a_blk, b_blk, acc); });
      if (round + 1 == side) break;
      const int tag = kTagShift + 2 * round;
      proc.send(left, tag, a_blk, CommKind::shift_a);
      proc.send(up, tag + 1, b_blk, CommKind::shift_b);
      a_blk = to_block(proc.receive(right, tag));
      b_blk = to_block(proc.receive(down, tag + 1));
    }
  });
  return c;
}

DistributedMatrix cannon_chain(std::span<const MatrixRef> factors, ProcessorGrid& grid, Phase phase) {
  if (factors.empty()) throw std::invalid_argument("cannon_chain: empty factor list");
  DistributedMatrix product = factors.back().get();
  for (std::size_t k = factors.size() - 1; k-- > 0;) {
    product = cannon_multiply(factors[k].get(), product, grid, phase);
  }
  return product;
}

DistributedMatrix cannon_power(const DistributedMatrix& m, int k, ProcessorGrid& grid, Phase phase) {
  if (k < 1) throw std::invalid_argument("cannon_power: exponent must be >= 1");
  std::vector<MatrixRef> factors(static_cast<std::size_t>(k), std::cref(m));
  return cannon_chain(factors, grid, phase);
}

namespace {

// Runs y += alpha * x blockwise on the owning processors.
void distributed_axpy(Complex alpha, const DistributedMatrix& x, DistributedMatrix& y, ProcessorGrid& grid,
                      Phase phase) {
  grid.run(phase, [&](Processor& proc) {
    proc.compute([&] { axpy(alpha, x.block(proc.rank()), y.block(proc.rank())); });
  });
}

DistributedMatrix taylor_series(const ComplexMatrix& hamiltonian, Complex prefactor, int k_max,
                                ProcessorGrid& grid, int& multiplies) {
  const int side = grid.config().side();
  const DistributedMatrix base = DistributedMatrix::scatter(scaled(hamiltonian, prefactor), side);
  DistributedMatrix sum = DistributedMatrix::identity(hamiltonian.rows(), side);
  distributed_axpy(1.0, base, sum, grid, Phase::setup);
  DistributedMatrix power = base;
  double factorial = 1.0;
  for (int k = 2; k <= k_max; ++k) {
    power = cannon_multiply(power, base, grid, Phase::setup);
    ++multiplies;
    factorial *= k;
    distributed_axpy(1.0 / factorial, power, sum, grid, Phase::setup);
  }
  return sum;
}

}  // namespace

PropagatorPair build_propagators(const ComplexMatrix& hamiltonian, double dt, ProcessorGrid& grid,
                                 const PropagatorOptions& options) {
  if (!hamiltonian.is_square()) {
    throw DimensionMismatch("build_propagators: Hamiltonian is " + hamiltonian.shape_string());
  }
  if (!(dt > 0.0)) throw std::invalid_argument("build_propagators: dt must be > 0");
  if (options.k_max < 1) throw std::invalid_argument("build_propagators: k_max must be >= 1");
  if (!(options.hbar > 0.0)) throw std::invalid_argument("build_propagators: hbar must be > 0");

  std::vector<std::string> warnings;
  const double scale = max_abs(hamiltonian);
  const double defect = hermiticity_defect(hamiltonian);
  if (defect > 1e-12 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "Hamiltonian is not Hermitian (defect " << defect << ")";
    if (options.strict) throw std::invalid_argument("build_propagators: " + msg.str());
    warnings.push_back(msg.str());
  }
  const double step_size = scale * dt / options.hbar;
  if (step_size > options.step_warning_threshold) {
    std::ostringstream msg;
    msg << "max|H| dt / hbar = " << step_size << " exceeds " << options.step_warning_threshold
        << "; Taylor truncation at order " << options.k_max << " may lose accuracy";
    warnings.push_back(msg.str());
  }

  const double theta = dt / options.hbar;
  int multiplies = 0;
  DistributedMatrix left = taylor_series(hamiltonian, Complex(0.0, -theta), options.k_max, grid, multiplies);
  DistributedMatrix right = taylor_series(hamiltonian, Complex(0.0, theta), options.k_max, grid, multiplies);
  return {std::move(left), std::move(right), options.k_max, dt, multiplies, std::move(warnings)};
}

DistributedMatrix unitary_step(const DistributedMatrix& rho, const PropagatorPair& props, ProcessorGrid& grid) {
  if (!(rho.layout() == props.left.layout()) || !(rho.layout() == props.right.layout())) {
    throw DimensionMismatch("unitary_step: density matrix (dim " + std::to_string(rho.dim()) +
                            ") does not match propagators (dim " + std::to_string(props.left.dim()) + ")");
  }
  const std::array<MatrixRef, 3> factors{std::cref(props.left), std::cref(rho), std::cref(props.right)};
  return cannon_chain(factors, grid, Phase::unitary);
}

}  // namespace lqed
