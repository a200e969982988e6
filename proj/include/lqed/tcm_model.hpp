#pragma once

#include <cstddef>
#include <vector>

#include "lqed/matrix.hpp"
#include "lqed/subspace.hpp"

namespace lqed {

/// Tavis-Cummings parameters in internal units (hbar = 1, energies in units of hbar*omega).
struct ModelParams {
  int n_atoms = 1;
  double hbar_omega = 1.0;  ///< E: photon and atomic excitation energy
  double g = 0.1;           ///< atom-field coupling
  double gamma = 0.0;       ///< photon leak rate
  double gamma_prime = 0.0; ///< influx rate, below gamma
  double hbar = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Elementary jump |target><source| with forward rate gamma and reverse rate gamma_prime.
struct Channel {
  std::size_t source = 0;
  std::size_t target = 0;
  double gamma = 0.0;
  double gamma_prime = 0.0;

  bool operator==(const Channel&) const = default;
};

/// RWA Hamiltonian sum_i [E a_i^+ a_i + E s_i^+ s_i + g (a_i^+ s_i + a_i s_i^+)] on the subspace.
ComplexMatrix build_hamiltonian(const ModelParams& params, const Subspace& space);

/// One photon-loss channel per (state, atom) with a photon present, in ascending
/// (state index, atom) order.
std::vector<Channel> build_channels(const ModelParams& params, const Subspace& space);

/// The subspace the solver runs in: closure of the all-excited state under the TCM moves.
Subspace tcm_subspace(const ModelParams& params);

}  // namespace lqed
