#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace jnr {

/// SplitMix64 generator. Used instead of <random> engines so that seeded
/// output is identical across standard library implementations, which the
/// byte-determinism contract of the CLI requires.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = next_double();
    } while (u <= 0.0);
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> next_complex_gaussian() {
    return {next_gaussian(), next_gaussian()};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a per-task seed from a top-level seed, a module name, and a task
/// index (FNV-1a over the bytes, then a SplitMix64 finalizer). Keeps parallel
/// scheduling out of the stream of any single task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view module,
                                 std::uint64_t task_index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(seed >> (8 * i)));
  for (char c : module) mix_byte(static_cast<std::uint8_t>(c));
  for (int i = 0; i < 8; ++i)
    mix_byte(static_cast<std::uint8_t>(task_index >> (8 * i)));
  return SplitMix64(h).next_u64();
}

/// Haar-ish random unit vector: normalized i.i.d. complex Gaussian entries.
inline Eigen::VectorXcd random_unit_vector(int dim, SplitMix64& rng) {
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.next_complex_gaussian();
  return v / v.norm();
}

/// Random Hermitian matrix with Gaussian entries, symmetrized.
inline Eigen::MatrixXcd random_hermitian_matrix(int dim, SplitMix64& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_gaussian();
  return 0.5 * (g + g.adjoint());
}

/// Random full-rank density matrix G G^dag / Tr.
inline Eigen::MatrixXcd random_density_entries(int dim, SplitMix64& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_gaussian();
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace jnr
