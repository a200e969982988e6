#include "lqed/tcm_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lqed {

namespace {

void require_truncated_alphabet(const BasisState& s) {
  for (int a = 0; a < s.atom_count(); ++a) {
    const auto l = s.letter(a);
    if (l.photons + l.level > 1) {
      throw std::invalid_argument("state " + s.ket() + " has atom " + std::to_string(a) +
                                  " outside the {00, 01, 10} alphabet");
    }
  }
}

std::size_t require_index(const Subspace& space, const BasisState& s, const char* what) {
  auto idx = space.index_of(s);
  if (!idx) {
    throw std::invalid_argument(std::string(what) + " target " + s.ket() +
                                " is not in the subspace (not closed)");
  }
  return *idx;
}

void require_atoms_match(const ModelParams& params, const Subspace& space) {
  if (space.atom_count() != params.n_atoms) {
    throw std::invalid_argument("subspace has " + std::to_string(space.atom_count()) +
                                " atoms, model has " + std::to_string(params.n_atoms));
  }
}

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
  if (n_atoms < 1 || n_atoms > BasisState::kMaxAtoms) fail("n_atoms must be >= 1");
  if (!(hbar_omega >= 0.0) || !std::isfinite(hbar_omega)) fail("hbar_omega must be >= 0");
  if (!(g >= 0.0) || !std::isfinite(g)) fail("g must be >= 0");
  if (!(hbar > 0.0)) fail("hbar must be > 0");
  if (!(gamma >= 0.0) || !(gamma_prime >= 0.0)) fail("rates must be >= 0");
  if (gamma_prime > 0.0 && !(gamma_prime < gamma)) fail("gamma_prime must be below gamma");
}

ComplexMatrix build_hamiltonian(const ModelParams& params, const Subspace& space) {
  params.validate();
  require_atoms_match(params, space);
  const std::size_t n = space.dimension();
  ComplexMatrix h(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& s = space.state(r);
    require_truncated_alphabet(s);
    h(r, r) = params.hbar_omega * excitation_number(s);
    for (int a = 0; a < s.atom_count(); ++a) {
      // a_i^+ s_i takes (0,1) to (1,0); its adjoint fills the mirrored entry.
      if (s.letter(a) == AtomLetter{0, 1}) {
        const std::size_t c = require_index(space, s.with_letter(a, {1, 0}), "exchange");
        h(c, r) = params.g;
        h(r, c) = params.g;
      }
    }
  }
  return h;
}

std::vector<Channel> build_channels(const ModelParams& params, const Subspace& space) {
  params.validate();
  require_atoms_match(params, space);
  std::vector<Channel> channels;
  for (std::size_t r = 0; r < space.dimension(); ++r) {
    const auto& s = space.state(r);
    for (int a = 0; a < s.atom_count(); ++a) {
      const auto l = s.letter(a);
      if (l.photons != 1) continue;
      const std::size_t target = require_index(space, s.with_letter(a, {0, l.level}), "photon loss");
      channels.push_back({r, target, params.gamma, params.gamma_prime});
    }
  }
  return channels;
}

Subspace tcm_subspace(const ModelParams& params) {
  params.validate();
  const auto moves = tcm_moves(params.gamma_prime > 0.0);
  return generate_subspace(params.n_atoms, BasisState::all_excited(params.n_atoms), moves);
}

}  // namespace lqed
