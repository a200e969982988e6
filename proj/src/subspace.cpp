#include "lqed/subspace.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace lqed {

namespace {

void check_atom_count(int n_atoms) {
  if (n_atoms < 1 || n_atoms > BasisState::kMaxAtoms) {
    throw std::invalid_argument("atom count must be in [1, " +
                                std::to_string(BasisState::kMaxAtoms) + "], got " +
                                std::to_string(n_atoms));
  }
}

std::string letter_string(AtomLetter l) {
  return std::to_string(l.photons) + std::to_string(l.level);
}

}  // namespace

BasisState::BasisState(int n_atoms, std::uint64_t word) : n_atoms_(n_atoms), word_(word) {
  check_atom_count(n_atoms);
  if (word >> (2 * n_atoms) != 0) {
    throw std::invalid_argument("basis word " + std::to_string(word) + " has bits beyond " +
                                std::to_string(n_atoms) + " atoms");
  }
}

BasisState BasisState::from_letters(std::span<const AtomLetter> letters) {
  check_atom_count(static_cast<int>(letters.size()));
  std::uint64_t word = 0;
  for (const auto& l : letters) {
    if (!l.valid()) throw std::invalid_argument("atom letter out of alphabet: " + letter_string(l));
    word = (word << 2) | static_cast<std::uint64_t>(2 * l.photons + l.level);
  }
  return {static_cast<int>(letters.size()), word};
}

BasisState BasisState::all_excited(int n_atoms) {
  std::vector<AtomLetter> letters(static_cast<std::size_t>(n_atoms), AtomLetter{0, 1});
  return from_letters(letters);
}

AtomLetter BasisState::letter(int atom) const {
  if (atom < 0 || atom >= n_atoms_) throw std::out_of_range("atom index " + std::to_string(atom));
  const auto bits = static_cast<int>((word_ >> shift(atom)) & 3u);
  return {bits >> 1, bits & 1};
}

BasisState BasisState::with_letter(int atom, AtomLetter value) const {
  if (atom < 0 || atom >= n_atoms_) throw std::out_of_range("atom index " + std::to_string(atom));
  if (!value.valid()) throw std::invalid_argument("atom letter out of alphabet: " + letter_string(value));
  const std::uint64_t mask = std::uint64_t{3} << shift(atom);
  const std::uint64_t bits = static_cast<std::uint64_t>(2 * value.photons + value.level) << shift(atom);
  return {n_atoms_, (word_ & ~mask) | bits};
}

std::string BasisState::ket() const {
  std::string out = "|";
  for (int a = 0; a < n_atoms_; ++a) {
    if (a > 0) out += ' ';
    out += letter_string(letter(a));
  }
  return out + ">";
}

int excitation_number(const BasisState& s) {
  int total = 0;
  for (int a = 0; a < s.atom_count(); ++a) total += s.letter(a).excitation();
  return total;
}

std::vector<LocalMove> tcm_moves(bool with_influx) {
  std::vector<LocalMove> moves = {
      {{0, 1}, {1, 0}},  // atom emits into its mode
      {{1, 0}, {0, 1}},  // atom reabsorbs
      {{1, 0}, {0, 0}},  // photon leaks out
  };
  if (with_influx) moves.push_back({{0, 0}, {1, 0}});
  return moves;
}

Subspace::Subspace(int n_atoms, std::vector<BasisState> states)
    : n_atoms_(n_atoms), states_(std::move(states)) {
  check_atom_count(n_atoms);
  std::sort(states_.begin(), states_.end());
  index_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].atom_count() != n_atoms) throw std::invalid_argument("Subspace: atom count mismatch");
    if (!index_.emplace(states_[i].word(), i).second) {
      throw std::invalid_argument("Subspace: duplicate state " + states_[i].ket());
    }
  }
}

std::uint64_t Subspace::full_dimension() const { return std::uint64_t{1} << (2 * n_atoms_); }

std::optional<std::size_t> Subspace::index_of(const BasisState& s) const {
  if (s.atom_count() != n_atoms_) return std::nullopt;
  auto it = index_.find(s.word());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Subspace generate_subspace(int n_atoms, const BasisState& initial, std::span<const LocalMove> moves) {
  check_atom_count(n_atoms);
  if (initial.atom_count() != n_atoms) {
    throw std::invalid_argument("initial state has " + std::to_string(initial.atom_count()) +
                                " atoms, expected " + std::to_string(n_atoms));
  }
  for (const auto& m : moves) {
    if (!m.from.valid() || !m.to.valid()) {
      throw std::invalid_argument("move " + letter_string(m.from) + " -> " + letter_string(m.to) +
                                  " leaves the {0,1} x {0,1} alphabet");
    }
  }

  std::unordered_set<std::uint64_t> seen{initial.word()};
  std::vector<BasisState> members{initial};
  std::deque<BasisState> frontier{initial};
  while (!frontier.empty()) {
    const BasisState current = frontier.front();
    frontier.pop_front();
    for (int atom = 0; atom < n_atoms; ++atom) {
      const AtomLetter here = current.letter(atom);
      for (const auto& m : moves) {
        if (!(m.from == here)) continue;
        BasisState next = current.with_letter(atom, m.to);
        if (seen.insert(next.word()).second) {
          members.push_back(next);
          frontier.push_back(next);
        }
      }
    }
  }
  return {n_atoms, std::move(members)};
}

double memory_ratio(std::uint64_t reduced_dim, std::uint64_t full_dim) {
  if (reduced_dim == 0 || full_dim == 0 || reduced_dim > full_dim) {
    throw std::invalid_argument("memory_ratio: need 0 < reduced <= full, got " +
                                std::to_string(reduced_dim) + " / " + std::to_string(full_dim));
  }
  const double ratio = static_cast<double>(reduced_dim) / static_cast<double>(full_dim);
  return ratio * ratio;
}

void export_subspace(std::ostream& os, const Subspace& space) {
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto& s = space.state(i);
    os << i << ' ' << s.word() << ' ' << s.ket() << '\n';
  }
}

}  // namespace lqed
