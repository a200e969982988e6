#pragma once

// Reference helpers shared by the unit tests and the acceptance binary. Nothing
// here calls into the library's arithmetic: products, Kronecker operators and
// reachability are recomputed from scratch.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "lqed/matrix.hpp"
#include "lqed/tcm_model.hpp"

namespace lqed::testing {

inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (auto& v : m.entries()) v = {u(rng), u(rng)};
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  ComplexMatrix m = random_matrix(n, n, rng);
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

/// B B^+ / Tr(B B^+): Hermitian, positive semidefinite, unit trace.
inline ComplexMatrix random_density(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix b = random_matrix(n, n, rng);
  ComplexMatrix rho(n, n);
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(i, k) * std::conj(b(j, k));
      rho(i, j) = s;
    }
  for (std::size_t i = 0; i < n; ++i) tr += rho(i, i).real();
  for (auto& v : rho.entries()) v /= tr;
  for (std::size_t i = 0; i < n; ++i) rho(i, i) = rho(i, i).real();
  return rho;
}

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

// ---------------------------------------------------------------------------
// Full 4^n space. Per-atom local basis index 2p + l, atom 0 most significant,
// so a full-space index equals the packed word of a BasisState.

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Photon annihilation on one site, photon number truncated to {0, 1}.
inline ComplexMatrix local_a() {
  ComplexMatrix m(4, 4);
  m(0, 2) = 1.0;  // |1 0> -> |0 0>
  m(1, 3) = 1.0;  // |1 1> -> |0 1>
  return m;
}

/// Atomic lowering on one site.
inline ComplexMatrix local_sigma() {
  ComplexMatrix m(4, 4);
  m(0, 1) = 1.0;  // |0 1> -> |0 0>
  m(2, 3) = 1.0;  // |1 1> -> |1 0>
  return m;
}

inline ComplexMatrix embed(const ComplexMatrix& local, int atom, int n_atoms) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (int a = 0; a < n_atoms; ++a) out = kron(out, a == atom ? local : ComplexMatrix::identity(4));
  return out;
}

inline ComplexMatrix dagger_of(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

/// sum_i [E a^+a + E s^+s + g (a^+ s + a s^+)] on the full 4^n space.
inline ComplexMatrix full_tcm_hamiltonian(int n_atoms, double energy, double g) {
  const std::size_t dim = std::size_t{1} << (2 * n_atoms);
  ComplexMatrix h(dim, dim);
  auto add = [&](const ComplexMatrix& term, double w) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) h(i, j) += w * term(i, j);
  };
  for (int i = 0; i < n_atoms; ++i) {
    const ComplexMatrix a = embed(local_a(), i, n_atoms);
    const ComplexMatrix s = embed(local_sigma(), i, n_atoms);
    const ComplexMatrix ad = dagger_of(a);
    const ComplexMatrix sd = dagger_of(s);
    add(naive_product(ad, a), energy);
    add(naive_product(sd, s), energy);
    add(naive_product(ad, s), g);
    add(naive_product(a, sd), g);
  }
  return h;
}

/// States reachable from the all-excited word through nonzero matrix elements of
/// the Hamiltonian or of a photon-loss jump (and photon-gain when influx is on).
/// Each generator is a single-site 4x4 operator applied to every atom of every
/// reached word until nothing new appears; the whole 4^n space is admissible.
inline std::set<std::uint64_t> brute_force_reachable(int n_atoms, bool influx) {
  const ComplexMatrix a = local_a();
  const ComplexMatrix s = local_sigma();
  std::vector<ComplexMatrix> generators{naive_product(dagger_of(a), s), naive_product(a, dagger_of(s)), a};
  // Influx re-creates a photon only where loss could have removed one; the
  // truncated alphabet has no doubly-occupied site.
  if (influx) generators.push_back(naive_product(dagger_of(a), naive_product(s, dagger_of(s))));

  std::uint64_t start = 0;
  for (int i = 0; i < n_atoms; ++i) start = (start << 2) | 1u;
  std::set<std::uint64_t> seen{start};
  std::vector<std::uint64_t> frontier{start};
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t word : frontier)
      for (int atom = 0; atom < n_atoms; ++atom) {
        const int shift = 2 * (n_atoms - 1 - atom);
        const auto local = static_cast<std::size_t>((word >> shift) & 3u);
        for (const auto& op : generators)
          for (std::size_t out = 0; out < 4; ++out) {
            if (op(out, local) == Complex(0.0)) continue;
            const std::uint64_t w = (word & ~(std::uint64_t{3} << shift)) | (std::uint64_t{out} << shift);
            if (seen.insert(w).second) next.push_back(w);
          }
      }
    frontier = std::move(next);
  }
  return seen;
}

/// Euler dissipator increment dt * sum_k [gamma_k (A rho A^+ - {A^+A, rho}/2)
/// + gamma'_k (A^+ rho A - {A A^+, rho}/2)] with dense A_k = |target><source|.
inline ComplexMatrix dense_lindblad_increment(const ComplexMatrix& rho, std::span<const Channel> channels, double dt) {
  const std::size_t n = rho.rows();
  ComplexMatrix out(n, n);
  auto add = [&](const ComplexMatrix& m, double w) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += w * m(i, j);
  };
  for (const auto& ch : channels) {
    ComplexMatrix a(n, n);
    a(ch.target, ch.source) = 1.0;
    const ComplexMatrix ad = dagger_of(a);
    const ComplexMatrix ada = naive_product(ad, a);
    const ComplexMatrix aad = naive_product(a, ad);
    add(naive_product(naive_product(a, rho), ad), dt * ch.gamma);
    add(naive_product(ada, rho), -0.5 * dt * ch.gamma);
    add(naive_product(rho, ada), -0.5 * dt * ch.gamma);
    add(naive_product(naive_product(ad, rho), a), dt * ch.gamma_prime);
    add(naive_product(aad, rho), -0.5 * dt * ch.gamma_prime);
    add(naive_product(rho, aad), -0.5 * dt * ch.gamma_prime);
  }
  return out;
}

inline std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace lqed::testing
