#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/hermitian.hpp"
#include "jnr/parallel.hpp"

namespace jnr {

/// Expectation vector of the thermal state of n . F with the generating
/// direction attached. The direction is a "fake" normal: away from the
/// zero-temperature limit it is generally not the outward normal at the
/// point it generates.
struct ThermalPoint {
  Eigen::VectorXd point;
  Direction fake_normal;
  double beta = 0.0;  // +infinity selects the ground-space limit
};

/// b_beta(n): image of exp(-beta n.F)/Z. At beta = infinity the state is the
/// equal-weight mixture over the ground space of n . F, which is the limit
/// of the Gibbs family; for a nondegenerate ground level this is the
/// boundary point supported in direction -n.
inline ThermalPoint thermal_point(const ObservableSet& set, const Direction& n,
                                  double beta,
                                  double gap_tol = kDefaultGapTol) {
  if (n.k() != set.k())
    throw DimensionMismatch("thermal_point direction dimension");
  if (std::isnan(beta) || beta < 0.0)
    throw InvalidArgument("thermal_point requires beta >= 0 or infinity");
  const HermitianOperator h = set.combine(n.vec());
  if (std::isinf(beta)) {
    // ground space of n.F = top eigenspace of -n.F
    const EigenspaceProjector ground =
        lambda_max_projector(HermitianOperator(-h.mat()), gap_tol);
    const DensityMatrix rho = DensityMatrix::unchecked(ground.projector);
    return {set.expectation_point(rho), n, beta};
  }
  const DensityMatrix rho = gibbs_state(h, beta);
  return {set.expectation_point(rho), n, beta};
}

/// Cartesian product evaluation, beta-major then direction-minor. The
/// (beta, n) pairs are independent and may run on several threads with the
/// same output order.
inline std::vector<ThermalPoint> thermal_range_sweep(
    const ObservableSet& set, const std::vector<double>& betas,
    const std::vector<Direction>& directions, double gap_tol = kDefaultGapTol,
    int threads = 1) {
  if (betas.empty() || directions.empty())
    throw InvalidArgument("thermal_range_sweep requires nonempty inputs");
  const int total = static_cast<int>(betas.size() * directions.size());
  std::vector<std::optional<ThermalPoint>> slots(total);
  parallel_for(total, threads, [&](int i) {
    const double beta = betas[i / directions.size()];
    const Direction& n = directions[i % directions.size()];
    slots[i] = thermal_point(set, n, beta, gap_tol);
  });
  std::vector<ThermalPoint> points;
  points.reserve(total);
  for (auto& slot : slots) points.push_back(std::move(*slot));
  return points;
}

}  // namespace jnr
