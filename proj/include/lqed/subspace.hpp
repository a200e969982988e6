#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lqed {

/// Occupation of one atom site: free photons p and electron level l, both 0 or 1.
struct AtomLetter {
  int photons = 0;
  int level = 0;

  bool valid() const { return (photons == 0 || photons == 1) && (level == 0 || level == 1); }
  int excitation() const { return photons + level; }
  bool operator==(const AtomLetter&) const = default;
};

/// Product basis state |p_1 l_1> ... |p_n l_n>, packed two bits per atom with
/// atom 0 in the most significant pair (so the integer reads like the ket).
class BasisState {
 public:
  static constexpr int kMaxAtoms = 31;

  BasisState(int n_atoms, std::uint64_t word);
  static BasisState from_letters(std::span<const AtomLetter> letters);
  /// Every atom (p, l) = (0, 1): excited atoms, empty cavity modes.
  static BasisState all_excited(int n_atoms);

  int atom_count() const { return n_atoms_; }
  std::uint64_t word() const { return word_; }

  AtomLetter letter(int atom) const;
  BasisState with_letter(int atom, AtomLetter value) const;

  /// "|01 10>" style label.
  std::string ket() const;

  auto operator<=>(const BasisState&) const = default;

 private:
  int shift(int atom) const { return 2 * (n_atoms_ - 1 - atom); }

  int n_atoms_;
  std::uint64_t word_;
};

/// Sum over atoms of photons + level.
int excitation_number(const BasisState& s);

/// Single-atom rewrite rule: any atom currently in `from` may move to `to`.
struct LocalMove {
  AtomLetter from;
  AtomLetter to;
};

/// Moves for the Tavis-Cummings model restricted to the {00, 01, 10} alphabet:
/// photon/electron exchange both ways, photon loss (10 -> 00) and, when
/// requested, the influx channel reversing a loss (00 -> 10).
std::vector<LocalMove> tcm_moves(bool with_influx);

/// Ordered, closed set of reachable basis states.
class Subspace {
 public:
  Subspace(int n_atoms, std::vector<BasisState> states);

  int atom_count() const { return n_atoms_; }
  std::size_t dimension() const { return states_.size(); }
  /// 4^n_atoms: dimension of the full tensor-product space.
  std::uint64_t full_dimension() const;

  const BasisState& state(std::size_t index) const { return states_[index]; }
  std::span<const BasisState> states() const { return states_; }

  std::optional<std::size_t> index_of(const BasisState& s) const;
  bool contains(const BasisState& s) const { return index_of(s).has_value(); }

 private:
  int n_atoms_;
  std::vector<BasisState> states_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Breadth-first closure of {initial} under the local moves, ordered by ascending word.
Subspace generate_subspace(int n_atoms, const BasisState& initial, std::span<const LocalMove> moves);

/// (reduced / full)^2: fraction of dense-matrix memory kept after the reduction.
double memory_ratio(std::uint64_t reduced_dim, std::uint64_t full_dim);

/// One line per state: "<index> <word> <ket>".
void export_subspace(std::ostream& os, const Subspace& space);

}  // namespace lqed
