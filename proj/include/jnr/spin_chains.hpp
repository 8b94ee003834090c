#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"

namespace jnr {

/// Dense periodic qubit chains. 2^N state vectors cap at N = 12 (d = 4096);
/// everything here is exact diagonalization scale.
inline constexpr int kMaxChainSites = 12;

namespace spin_detail {

inline void check_sites(int sites) {
  if (sites < 2) throw InvalidArgument("chain needs at least 2 sites");
  if (sites > kMaxChainSites)
    throw DimensionLimit("dense chains support at most " +
                         std::to_string(kMaxChainSites) + " sites, got " +
                         std::to_string(sites));
}

inline Matrix pauli(char axis) {
  switch (axis) {
    case 'x':
      return paulis::x();
    case 'y':
      return paulis::y();
    case 'z':
      return paulis::z();
    default:
      throw InvalidArgument("axis must be one of x, y, z");
  }
}

}  // namespace spin_detail

/// Pauli sigma_axis embedded at site i (1-based) of an N-site chain:
/// 1 x ... x sigma x ... x 1.
inline HermitianOperator site_operator(int sites, int site, char axis) {
  spin_detail::check_sites(sites);
  if (site < 1 || site > sites)
    throw IndexOutOfRange("site " + std::to_string(site) +
                          " outside 1.." + std::to_string(sites));
  const long dim_left = 1L << (site - 1);
  const long dim_right = 1L << (sites - site);
  Matrix m = kron(Matrix::Identity(dim_left, dim_left),
                  kron(spin_detail::pauli(axis),
                       Matrix::Identity(dim_right, dim_right)));
  return HermitianOperator(std::move(m));
}

/// S_axis = sum_i s^(i)_axis.
inline HermitianOperator total_spin_component(int sites, char axis) {
  spin_detail::check_sites(sites);
  const long dim = 1L << sites;
  Matrix acc = Matrix::Zero(dim, dim);
  for (int i = 1; i <= sites; ++i) acc += site_operator(sites, i, axis).mat();
  return HermitianOperator(std::move(acc));
}

/// (1/N) sum_i s^(i+1 mod N)_axis s^(i)_axis, the periodic nearest-neighbor
/// coupling. On two sites both bonds coincide, so the sum double-counts and
/// the normalization restores a single sigma x sigma.
inline HermitianOperator neighbor_coupling(int sites, char axis) {
  spin_detail::check_sites(sites);
  const long dim = 1L << sites;
  Matrix acc = Matrix::Zero(dim, dim);
  for (int i = 1; i <= sites; ++i) {
    const int j = i % sites + 1;
    acc += (site_operator(sites, j, axis).mat() *
            site_operator(sites, i, axis).mat());
  }
  return HermitianOperator(acc / static_cast<double>(sites));
}

/// (1/N) sum_i s^(i)_axis.
inline HermitianOperator normalized_field(int sites, char axis) {
  return HermitianOperator(total_spin_component(sites, axis).mat() /
                           static_cast<double>(sites));
}

/// Ising chain with two external fields, split into the three normalized
/// terms whose range is swept by the coupling vector (J, h, alpha):
/// H1 = ZZ coupling, H2 = z field, H3 = x field. The 1/N normalization makes
/// the spectral support independent of N.
inline ObservableSet ising_observables(int sites) {
  return ObservableSet({neighbor_coupling(sites, 'z'),
                        normalized_field(sites, 'z'),
                        normalized_field(sites, 'x')},
                       {"H1", "H2", "H3"});
}

/// XX and ZZ couplings against the total-spin length:
/// H3 = (S_x^2 + S_y^2 + S_z^2) / (N (N + 1)).
inline ObservableSet xxzz_spin_observables(int sites) {
  spin_detail::check_sites(sites);
  const long dim = 1L << sites;
  Matrix s2 = Matrix::Zero(dim, dim);
  for (char axis : {'x', 'y', 'z'}) {
    const Matrix s = total_spin_component(sites, axis).mat();
    s2 += s * s;
  }
  s2 /= static_cast<double>(sites) * (sites + 1);
  return ObservableSet({neighbor_coupling(sites, 'x'),
                        neighbor_coupling(sites, 'z'),
                        HermitianOperator(std::move(s2))},
                       {"H1", "H2", "H3"});
}

/// Cyclic shift permutation: site i maps to site i+1. Shipped chain terms
/// commute with it (translation invariance).
inline Matrix cyclic_shift(int sites) {
  spin_detail::check_sites(sites);
  const long dim = 1L << sites;
  Matrix t = Matrix::Zero(dim, dim);
  for (long x = 0; x < dim; ++x) {
    // rotate the bit string one position: the last site's bit moves to the
    // front (site 1 holds the most significant bit)
    const long y = (x >> 1) | ((x & 1L) << (sites - 1));
    t(y, x) = 1.0;
  }
  return t;
}

struct TwoQubitExamples {
  ObservableSet bicone;
  ObservableSet ellipse_segment;
};

/// The dipole-type two-qubit triples: H1 = 3 sx sx - sum_i s_i s_i,
/// H2 = sz x 1 + 1 x sz, and H3 = sy x sy (bicone) or sz x sz (hull of an
/// ellipse and a segment).
inline TwoQubitExamples two_qubit_examples() {
  const Matrix id = Matrix::Identity(2, 2);
  Matrix h1 = 3.0 * kron(paulis::x(), paulis::x());
  h1 -= kron(paulis::x(), paulis::x());
  h1 -= kron(paulis::y(), paulis::y());
  h1 -= kron(paulis::z(), paulis::z());
  const Matrix h2 = kron(paulis::z(), id) + kron(id, paulis::z());
  const Matrix h3_bicone = kron(paulis::y(), paulis::y());
  const Matrix h3_ellipse = kron(paulis::z(), paulis::z());
  return {ObservableSet({HermitianOperator(h1), HermitianOperator(h2),
                         HermitianOperator(h3_bicone)},
                        {"H1", "H2", "H3"}),
          ObservableSet({HermitianOperator(h1), HermitianOperator(h2),
                         HermitianOperator(h3_ellipse)},
                        {"H1", "H2", "H3"})};
}

}  // namespace jnr
