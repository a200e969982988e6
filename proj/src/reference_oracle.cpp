#include "lqed/reference_oracle.hpp"

#include <stdexcept>
#include <string>

namespace lqed::oracle {

namespace {

ComplexMatrix product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("oracle product: " + a.shape_string() + " * " + b.shape_string());
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  return c;
}

ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

void accumulate(ComplexMatrix& into, const ComplexMatrix& term, double weight) {
  for (std::size_t i = 0; i < into.rows(); ++i)
    for (std::size_t j = 0; j < into.cols(); ++j) into(i, j) += weight * term(i, j);
}

void check_cap(std::size_t dim, const OracleOptions& options) {
  if (dim > options.dim_cap) {
    throw std::invalid_argument("oracle: dimension " + std::to_string(dim) + " exceeds cap " +
                                std::to_string(options.dim_cap));
  }
}

}  // namespace

ComplexMatrix taylor_propagator(const ComplexMatrix& hamiltonian, double dt, const OracleOptions& options) {
  const std::size_t n = hamiltonian.rows();
  if (hamiltonian.cols() != n) throw DimensionMismatch("oracle: Hamiltonian is " + hamiltonian.shape_string());
  check_cap(n, options);
  ComplexMatrix generator(n, n);
  const Complex prefactor(0.0, -dt / options.hbar);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) generator(i, j) = prefactor * hamiltonian(i, j);

  ComplexMatrix sum(n, n);
  ComplexMatrix term(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sum(i, i) = 1.0;
    term(i, i) = 1.0;
  }
  // term_k = term_{k-1} * G / k
  for (int k = 1; k <= options.k_max; ++k) {
    term = product(term, generator);
    for (auto& v : term.entries()) v /= static_cast<double>(k);
    accumulate(sum, term, 1.0);
  }
  return sum;
}

ComplexMatrix jump_operator(const Channel& channel, std::size_t dim) {
  if (channel.source >= dim || channel.target >= dim) throw std::out_of_range("oracle: channel index out of range");
  ComplexMatrix a(dim, dim);
  a(channel.target, channel.source) = 1.0;
  return a;
}

ComplexMatrix dense_dissipator(const ComplexMatrix& rho, std::span<const Channel> channels) {
  const std::size_t n = rho.rows();
  ComplexMatrix out(n, n);
  for (const auto& ch : channels) {
    const ComplexMatrix a = jump_operator(ch, n);
    const ComplexMatrix a_dag = dagger(a);
    if (ch.gamma != 0.0) {
      const ComplexMatrix a_dag_a = product(a_dag, a);
      accumulate(out, product(product(a, rho), a_dag), ch.gamma);
      accumulate(out, product(rho, a_dag_a), -0.5 * ch.gamma);
      accumulate(out, product(a_dag_a, rho), -0.5 * ch.gamma);
    }
    if (ch.gamma_prime != 0.0) {
      const ComplexMatrix a_a_dag = product(a, a_dag);
      accumulate(out, product(product(a_dag, rho), a), ch.gamma_prime);
      accumulate(out, product(rho, a_a_dag), -0.5 * ch.gamma_prime);
      accumulate(out, product(a_a_dag, rho), -0.5 * ch.gamma_prime);
    }
  }
  return out;
}

ComplexMatrix dense_step(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, std::span<const Channel> channels,
                         double dt, const OracleOptions& options) {
  const DenseIntegrator integrator(hamiltonian, {channels.begin(), channels.end()}, dt, options);
  return integrator.step(rho);
}

DenseIntegrator::DenseIntegrator(ComplexMatrix hamiltonian, std::vector<Channel> channels, double dt,
                                 OracleOptions options)
    : propagator_(taylor_propagator(hamiltonian, dt, options)),
      propagator_adjoint_(dagger(propagator_)),
      channels_(std::move(channels)),
      dt_(dt),
      options_(options) {}

ComplexMatrix DenseIntegrator::step(const ComplexMatrix& rho) const {
  if (rho.rows() != propagator_.rows() || rho.cols() != propagator_.cols()) {
    throw DimensionMismatch("oracle step: rho " + rho.shape_string() + " vs propagator " +
                            propagator_.shape_string());
  }
  ComplexMatrix next = product(product(propagator_, rho), propagator_adjoint_);
  const ComplexMatrix drift = dense_dissipator(next, channels_);
  accumulate(next, drift, dt_ / options_.hbar);
  return next;
}

}  // namespace lqed::oracle
