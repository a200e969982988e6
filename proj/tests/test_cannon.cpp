#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "lqed/cannon.hpp"
#include "lqed/distributed_matrix.hpp"
#include "lqed/subspace.hpp"
#include "lqed/tcm_model.hpp"
#include "test_support.hpp"

using namespace lqed;
using namespace lqed::testing;

namespace {

std::size_t expected_events(int side) {
  const auto px = static_cast<std::size_t>(side);
  return 2 * px * (px - 1) + 2 * px * px * (px - 1);
}

/// exp(-i H t) by Eigen's Hermitian eigendecomposition.
ComplexMatrix eigen_expm(const ComplexMatrix& h, double t, double sign) {
  const auto n = static_cast<Eigen::Index>(h.rows());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::exp(Complex(0.0, sign * es.eigenvalues()(k) * t));
  const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  ComplexMatrix out(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = u(i, j);
  return out;
}

}  // namespace

TEST_CASE("Cannon product equals the naive product on every grid") {
  std::mt19937_64 rng(31);
  for (std::size_t n : {4u, 5u, 7u, 9u, 27u}) {
    const auto a = random_matrix(n, n, rng);
    const auto b = random_matrix(n, n, rng);
    const auto expected = naive_product(a, b);
    for (int side = 1; side <= 4 && static_cast<std::size_t>(side) <= n; ++side) {
      CAPTURE(n);
      CAPTURE(side);
      ProcessorGrid grid{GridConfig(side)};
      const auto c = cannon_multiply(DistributedMatrix::scatter(a, side), DistributedMatrix::scatter(b, side), grid);
      CHECK(max_diff(c.gather(), expected) <= 1e-12);
      CHECK(grid.events(Phase::unitary).size() == expected_events(side));
    }
  }
}

TEST_CASE("only alignment and shift messages are exchanged") {
  std::mt19937_64 rng(32);
  ProcessorGrid grid{GridConfig(3)};
  const auto a = DistributedMatrix::scatter(random_matrix(8, 8, rng), 3);
  cannon_multiply(a, a, grid, Phase::setup);
  std::size_t align = 0, shift = 0;
  for (const auto& e : grid.events(Phase::setup)) {
    CHECK(e.src_rank != e.dst_rank);
    CHECK(e.kind != CommKind::point);
    if (e.kind == CommKind::align_a || e.kind == CommKind::align_b) ++align;
    else ++shift;
  }
  CHECK(align == 2 * 3 * 2);
  CHECK(shift == 2 * 9 * 2);
  CHECK(grid.events(Phase::unitary).empty());
}

TEST_CASE("chains and powers") {
  std::mt19937_64 rng(33);
  const std::size_t n = 6;
  const auto x = random_matrix(n, n, rng);
  const auto y = random_matrix(n, n, rng);
  const auto z = random_matrix(n, n, rng);
  ProcessorGrid grid{GridConfig(2)};
  const auto dx = DistributedMatrix::scatter(x, 2);
  const auto dy = DistributedMatrix::scatter(y, 2);
  const auto dz = DistributedMatrix::scatter(z, 2);
  const MatrixRef factors[] = {dx, dy, dz};
  const auto chain = cannon_chain(factors, grid).gather();
  CHECK(max_diff(chain, naive_product(x, naive_product(y, z))) <= 1e-12);
  CHECK_THROWS_AS(cannon_chain(std::span<const MatrixRef>{}, grid), std::invalid_argument);

  const auto cube = cannon_power(dx, 3, grid).gather();
  CHECK(max_diff(cube, naive_product(x, naive_product(x, x))) <= 1e-12);
  CHECK(cannon_power(dx, 1, grid).gather() == x);
  CHECK_THROWS_AS(cannon_power(dx, 0, grid), std::invalid_argument);
}

TEST_CASE("nilpotent shift matrix vanishes at its size") {
  ComplexMatrix s(4, 4);
  for (std::size_t i = 0; i + 1 < 4; ++i) s(i, i + 1) = 1.0;
  for (int side : {1, 2}) {
    ProcessorGrid grid{GridConfig(side)};
    const auto d = DistributedMatrix::scatter(s, side);
    CHECK(max_abs(cannon_power(d, 3, grid).gather()) == 1.0);
    CHECK(max_abs(cannon_power(d, 4, grid).gather()) == 0.0);
  }
}

TEST_CASE("layout mismatches are rejected") {
  ProcessorGrid grid{GridConfig(2)};
  const auto a = DistributedMatrix::identity(4, 2);
  const auto b = DistributedMatrix::identity(5, 2);
  CHECK_THROWS_AS(cannon_multiply(a, b, grid), DimensionMismatch);
  const auto c = DistributedMatrix::identity(4, 1);
  CHECK_THROWS_AS(cannon_multiply(c, c, grid), std::invalid_argument);
}

TEST_CASE("scalar propagator matches the truncated series") {
  const double h = 0.7, dt = 0.3;
  ProcessorGrid grid{GridConfig(1)};
  for (int k_max : {1, 2, 5, 10}) {
    PropagatorOptions opts;
    opts.k_max = k_max;
    opts.step_warning_threshold = 1.0;
    const auto props = build_propagators(ComplexMatrix{{h}}, dt, grid, opts);
    Complex left = 0.0, right = 0.0;
    double factorial = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      if (k > 0) factorial *= k;
      left += std::pow(Complex(0.0, -h * dt), k) / factorial;
      right += std::pow(Complex(0.0, h * dt), k) / factorial;
    }
    CHECK(std::abs(props.left.gather()(0, 0) - left) < 1e-15);
    CHECK(std::abs(props.right.gather()(0, 0) - right) < 1e-15);
    CHECK(props.multiplies == 2 * (k_max - 1));
    CHECK(props.warnings.empty());
  }
}

TEST_CASE("propagators approach the exact exponential") {
  std::mt19937_64 rng(34);
  const std::size_t n = 9;
  auto h = random_hermitian(n, rng);
  const double dt = 0.05 / max_abs(h);
  const auto exact_left = eigen_expm(h, dt, -1.0);
  const auto exact_right = eigen_expm(h, dt, +1.0);
  for (int side : {1, 2, 3}) {
    ProcessorGrid grid{GridConfig(side)};
    const auto props = build_propagators(h, dt, grid);
    CHECK(max_diff(props.left.gather(), exact_left) < 1e-13);
    CHECK(max_diff(props.right.gather(), exact_right) < 1e-13);
    // R and L^+ are the same series evaluated separately.
    CHECK(max_diff(props.right.gather(), adjoint(props.left.gather())) < 1e-15);
    const auto product = naive_product(props.left.gather(), props.right.gather());
    CHECK(max_diff(product, ComplexMatrix::identity(n)) < 1e-13);
  }
}

TEST_CASE("propagator construction diagnostics") {
  ProcessorGrid grid{GridConfig(1)};
  const ComplexMatrix h{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(build_propagators(h, 0.2, grid).warnings.size() == 1);
  CHECK(build_propagators(h, 0.05, grid).warnings.empty());

  const ComplexMatrix skew{{0.0, 1.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(build_propagators(skew, 0.01, grid), std::invalid_argument);
  PropagatorOptions lax;
  lax.strict = false;
  CHECK(build_propagators(skew, 0.01, grid, lax).warnings.size() == 1);

  CHECK_THROWS_AS(build_propagators(h, 0.0, grid), std::invalid_argument);
  PropagatorOptions bad;
  bad.k_max = 0;
  CHECK_THROWS_AS(build_propagators(h, 0.01, grid, bad), std::invalid_argument);
  CHECK_THROWS_AS(build_propagators(ComplexMatrix(2, 3), 0.01, grid), DimensionMismatch);
}

TEST_CASE("single-atom vacuum Rabi oscillation") {
  ModelParams p;
  p.n_atoms = 1;
  p.g = 0.5;
  const auto space = tcm_subspace(p);
  const auto h = build_hamiltonian(p, space);
  const std::size_t excited = *space.index_of(BasisState::all_excited(1));
  const double dt = 0.05 / (p.hbar_omega + p.g);
  const int steps = static_cast<int>(std::ceil(10 * 2 * M_PI / p.g / dt));
  for (int side : {1, 2}) {
    ProcessorGrid grid{GridConfig(side)};
    const auto props = build_propagators(h, dt, grid);
    ComplexMatrix rho0(3, 3);
    rho0(excited, excited) = 1.0;
    auto rho = DistributedMatrix::scatter(rho0, side);
    double worst = 0.0;
    for (int s = 1; s <= steps; ++s) {
      rho = unitary_step(rho, props, grid);
      if (s % 25 == 0 || s == steps) {
        const double expected = std::pow(std::cos(p.g * s * dt), 2);
        worst = std::max(worst, std::abs(rho.gather()(excited, excited).real() - expected));
      }
    }
    CHECK(worst < 1e-6);
  }
}
