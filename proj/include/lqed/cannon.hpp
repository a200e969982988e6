#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lqed/distributed_matrix.hpp"
#include "lqed/processor_grid.hpp"

namespace lqed {

/// Distributed product a * b by Cannon's algorithm: initial skew, then p_x rounds
/// of local multiply-accumulate separated by cyclic shifts (A left, B up). The
/// shift after the final round is skipped.
DistributedMatrix cannon_multiply(const DistributedMatrix& a, const DistributedMatrix& b,
                                  ProcessorGrid& grid, Phase phase = Phase::unitary);

using MatrixRef = std::reference_wrapper<const DistributedMatrix>;

/// Right-nested product M_1 (M_2 ( ... M_k)).
DistributedMatrix cannon_chain(std::span<const MatrixRef> factors, ProcessorGrid& grid,
                               Phase phase = Phase::unitary);

/// M^k as the right-nested chain of k copies of M.
DistributedMatrix cannon_power(const DistributedMatrix& m, int k, ProcessorGrid& grid,
                               Phase phase = Phase::unitary);

struct PropagatorOptions {
  int k_max = 10;
  double hbar = 1.0;
  /// Reject a non-Hermitian Hamiltonian instead of warning.
  bool strict = true;
  /// Warn when max|H_rs| * dt / hbar exceeds this.
  double step_warning_threshold = 0.1;
};

/// Truncated Taylor series of exp(-i H dt / hbar) (left) and exp(+i H dt / hbar) (right).
struct PropagatorPair {
  DistributedMatrix left;
  DistributedMatrix right;
  int k_max = 10;
  double dt = 0.0;
  int multiplies = 0;  ///< distributed products used to build both sides
  std::vector<std::string> warnings;
};

/// Builds L and R with incremental powers, power_k = Cannon(power_{k-1}, base),
/// so each side costs exactly k_max - 1 distributed products.
PropagatorPair build_propagators(const ComplexMatrix& hamiltonian, double dt, ProcessorGrid& grid,
                                 const PropagatorOptions& options = {});

/// rho -> L (rho R).
DistributedMatrix unitary_step(const DistributedMatrix& rho, const PropagatorPair& props,
                               ProcessorGrid& grid);

}  // namespace lqed
