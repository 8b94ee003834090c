#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/hermitian.hpp"
#include "jnr/random.hpp"

namespace jnr {

struct ProductState {
  Vector alpha;  // unit vector on the first factor
  Vector beta;   // unit vector on the second factor
};

/// Result of the alternating product-state maximization. The value is a
/// certified lower bound on the true product-state maximum: the returned
/// state attains it.
struct SeesawResult {
  double value = 0.0;
  ProductState state;
  int iterations = 0;
  int restarts_used = 0;
  std::vector<double> trace;  // per-iteration objective of the best restart
};

struct SeesawParams {
  int restarts = 20;
  int max_iters = 500;
  double conv_tol = 1e-11;
  std::uint64_t seed = 0;
};

namespace separable_detail {

/// Effective operator on factor A after contracting H with |beta> on B:
/// A_eff(i, i') = sum_{j j'} conj(beta_j) H(i d_b + j, i' d_b + j') beta_j'.
inline Matrix contract_second(const Matrix& h, int dim_a, int dim_b,
                              const Vector& beta) {
  Matrix eff(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip)
      eff(i, ip) =
          (beta.adjoint() * h.block(i * dim_b, ip * dim_b, dim_b, dim_b) *
           beta)(0);
  return eff;
}

inline Matrix contract_first(const Matrix& h, int dim_a, int dim_b,
                             const Vector& alpha) {
  Matrix eff = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip)
      eff += std::conj(alpha(i)) * alpha(ip) *
             h.block(i * dim_b, ip * dim_b, dim_b, dim_b);
  return eff;
}

inline Vector top_eigenvector(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 *
                                               (hermitian + hermitian.adjoint()));
  if (solver.info() != Eigen::Success)
    throw NoConvergence("seesaw eigenstep failed");
  return solver.eigenvectors().col(hermitian.rows() - 1);
}

inline double product_value(const Matrix& h, int dim_b, const Vector& alpha,
                            const Vector& beta) {
  Vector joint(alpha.size() * beta.size());
  for (int i = 0; i < alpha.size(); ++i)
    joint.segment(i * dim_b, dim_b) = alpha(i) * beta;
  return (joint.adjoint() * h * joint)(0).real();
}

}  // namespace separable_detail

/// Alternating maximization of <alpha x beta| H |alpha x beta>: fixing one
/// factor makes the other a top-eigenvector problem, so the objective never
/// decreases. Restarts from seeded rotation-invariant initial states guard
/// against local maxima; the best restart wins (ties go to the lowest
/// restart index).
inline SeesawResult max_product_expectation(const HermitianOperator& h,
                                            int dim_a, int dim_b,
                                            const SeesawParams& params = {}) {
  using namespace separable_detail;
  if (h.dim() != dim_a * dim_b)
    throw DimensionMismatch("max_product_expectation: dim != d_a * d_b");
  if (params.restarts < 1)
    throw InvalidArgument("seesaw needs at least one restart");

  SeesawResult best;
  bool have_best = false;
  for (int restart = 0; restart < params.restarts; ++restart) {
    SplitMix64 rng(derive_seed(params.seed, "separable-seesaw", restart));
    Vector alpha = random_unit_vector(dim_a, rng);
    Vector beta = random_unit_vector(dim_b, rng);
    std::vector<double> trace;
    double value = product_value(h.mat(), dim_b, alpha, beta);
    int iterations = 0;
    for (int iter = 0; iter < params.max_iters; ++iter) {
      alpha = top_eigenvector(contract_second(h.mat(), dim_a, dim_b, beta));
      const Matrix b_eff = contract_first(h.mat(), dim_a, dim_b, alpha);
      beta = top_eigenvector(b_eff);
      const double updated = (beta.adjoint() * b_eff * beta)(0).real();
      trace.push_back(updated);
      iterations = iter + 1;
      if (updated - value < params.conv_tol && iter > 0) {
        value = std::max(value, updated);
        break;
      }
      value = updated;
    }
    if (!have_best || value > best.value) {
      best.value = value;
      best.state = {alpha, beta};
      best.iterations = iterations;
      best.trace = std::move(trace);
      have_best = true;
    }
  }
  best.restarts_used = params.restarts;
  best.value =
      separable_detail::product_value(h.mat(), dim_b, best.state.alpha,
                                      best.state.beta);
  return best;
}

/// Inner approximation of the separable range: for each direction, the
/// seesaw optimizes n . F over product states and the optimizer's
/// expectation vector is emitted. Every point is attainable by a product
/// state, so the hull of the output is contained in L_sep.
inline std::vector<BoundaryPoint> separable_boundary(
    const ObservableSet& set, int dim_a, int dim_b,
    const std::vector<Direction>& directions, const SeesawParams& params = {}) {
  if (set.dim() != dim_a * dim_b)
    throw DimensionMismatch("separable_boundary: dim != d_a * d_b");
  std::vector<BoundaryPoint> points;
  points.reserve(directions.size());
  for (int di = 0; di < static_cast<int>(directions.size()); ++di) {
    const Direction& n = directions[di];
    SeesawParams sub = params;
    sub.seed = derive_seed(params.seed, "separable-direction", di);
    const HermitianOperator target = set.combine(n.vec());
    const SeesawResult res = max_product_expectation(target, dim_a, dim_b, sub);
    Vector joint(set.dim());
    for (int i = 0; i < dim_a; ++i)
      joint.segment(i * dim_b, dim_b) = res.state.alpha(i) * res.state.beta;
    points.push_back({set.expectation_point(joint), n, res.value, 1, 0, di});
  }
  return points;
}

/// The maximally entangled two-qubit projector partially transposed, plus
/// its locally rotated partner: X = (|psi+><psi+|)^T2 and
/// X_U = ((U x 1)|psi+><psi+|(U^dag x 1))^T2. |psi+> = (1,0,0,1)/sqrt(2) is
/// normalized so both spectra are {1/2, 1/2, 1/2, -1/2}.
inline std::pair<HermitianOperator, HermitianOperator> bell_witness_pair(
    const Matrix& u) {
  if (u.rows() != 2 || u.cols() != 2)
    throw WrongDimension("bell_witness_pair expects a 2x2 unitary");
  if ((u.adjoint() * u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10)
    throw NonUnitaryInput("U is not unitary within 1e-10");
  Vector psi(4);
  psi << 1, 0, 0, 1;
  psi /= std::sqrt(2.0);
  const Matrix projector = psi * psi.adjoint();
  const Vector rotated = kron(u, Matrix::Identity(2, 2)) * psi;
  const Matrix rotated_projector = rotated * rotated.adjoint();
  return {partial_transpose(HermitianOperator(projector), 2, 2,
                            Subsystem::second),
          partial_transpose(HermitianOperator(rotated_projector), 2, 2,
                            Subsystem::second)};
}

}  // namespace jnr
