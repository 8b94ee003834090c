#pragma once

#include <initializer_list>

#include "jnr/boundary.hpp"
#include "jnr/hermitian.hpp"

namespace fixtures {

inline jnr::Matrix mat3(std::initializer_list<double> vals) {
  jnr::Matrix m(3, 3);
  int i = 0;
  for (double v : vals) {
    m(i / 3, i % 3) = v;
    ++i;
  }
  return m;
}

// qutrit pair with a boundary cusp: block [[0,1],[1,0]] plus scalar -2,
// against diag(1,-1,0)
inline jnr::ObservableSet first_order_pair() {
  return jnr::ObservableSet(
      {jnr::HermitianOperator(mat3({0, 1, 0, 1, 0, 0, 0, 0, -2})),
       jnr::HermitianOperator(mat3({1, 0, 0, 0, -1, 0, 0, 0, 0}))});
}

// qutrit pair with a single flat boundary face: diag(0,0,1) against the
// 0/1 tridiagonal
inline jnr::ObservableSet flat_face_pair() {
  return jnr::ObservableSet(
      {jnr::HermitianOperator(mat3({0, 0, 0, 0, 0, 0, 0, 0, 1})),
       jnr::HermitianOperator(mat3({0, 1, 0, 1, 0, 1, 0, 1, 0}))});
}

// qutrit uncertainty pair with a common eigenvector (0,0,1)
inline std::pair<jnr::HermitianOperator, jnr::HermitianOperator>
trivial_uncertainty_pair() {
  return {jnr::HermitianOperator(mat3({0, 1, 0, 1, 0, 0, 0, 0, 0})),
          jnr::HermitianOperator(mat3({1, 0, 0, 0, 0, 0, 0, 0, -1}))};
}

// qutrit uncertainty pair without a common eigenvector; the variance-sum
// bound for it is 15/32
inline std::pair<jnr::HermitianOperator, jnr::HermitianOperator>
nontrivial_uncertainty_pair() {
  jnr::Matrix x(3, 3);
  x << 0, 1, 0,  //
      1, 0, jnr::Complex(0, 1),  //
      0, jnr::Complex(0, -1), 0;
  return {jnr::HermitianOperator(x),
          jnr::HermitianOperator(mat3({1, 0, 0, 0, 0, 0, 0, 0, -1}))};
}

inline jnr::HermitianOperator square(const jnr::HermitianOperator& a) {
  return jnr::HermitianOperator(a.mat() * a.mat());
}

inline jnr::HermitianOperator sum_of_squares(const jnr::HermitianOperator& a,
                                             const jnr::HermitianOperator& b) {
  return jnr::HermitianOperator(a.mat() * a.mat() + b.mat() * b.mat());
}

}  // namespace fixtures
