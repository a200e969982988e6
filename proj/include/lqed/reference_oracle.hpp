#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lqed/matrix.hpp"
#include "lqed/tcm_model.hpp"

namespace lqed::oracle {

// Single-worker dense reference for the split-step scheme. It shares no
// arithmetic with the distributed path: its own product loop, its own Taylor
// series and an explicit-operator dissipator.

struct OracleOptions {
  int k_max = 10;
  double hbar = 1.0;
  std::size_t dim_cap = 256;
};

/// exp(-i H dt / hbar) truncated at order k_max.
ComplexMatrix taylor_propagator(const ComplexMatrix& hamiltonian, double dt, const OracleOptions& options = {});

/// Dense |target><source| of dimension dim.
ComplexMatrix jump_operator(const Channel& channel, std::size_t dim);

/// sum_k gamma_k (A rho A^+ - {rho, A^+ A}/2) + gamma'_k (A^+ rho A - {rho, A A^+}/2),
/// evaluated with full dense products.
ComplexMatrix dense_dissipator(const ComplexMatrix& rho, std::span<const Channel> channels);

/// rho~ = U rho U^+, then rho~ + (dt / hbar) * dissipator(rho~).
ComplexMatrix dense_step(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, std::span<const Channel> channels,
                         double dt, const OracleOptions& options = {});

/// Dense stepper that caches the propagator across steps.
class DenseIntegrator {
 public:
  DenseIntegrator(ComplexMatrix hamiltonian, std::vector<Channel> channels, double dt, OracleOptions options = {});

  ComplexMatrix step(const ComplexMatrix& rho) const;

 private:
  ComplexMatrix propagator_;
  ComplexMatrix propagator_adjoint_;
  std::vector<Channel> channels_;
  double dt_;
  OracleOptions options_;
};

}  // namespace lqed::oracle
