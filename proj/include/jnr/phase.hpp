#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "jnr/classify.hpp"
#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"

namespace jnr {

/// Full spectra of H(theta) = cos(theta) H0 + sin(theta) H1 on a uniform
/// angular grid, with the per-angle gap above the ground level.
struct SpectrumSweep {
  std::vector<double> thetas;
  Eigen::MatrixXd levels;      // row per theta, ascending
  Eigen::VectorXd ground_gap;  // lambda_2 - lambda_1
  HermitianOperator h0;
  HermitianOperator h1;
};

inline SpectrumSweep spectrum_sweep(const HermitianOperator& h0,
                                    const HermitianOperator& h1,
                                    int num_thetas) {
  if (h0.dim() != h1.dim()) throw DimensionMismatch("spectrum_sweep dims");
  if (num_thetas < 8) throw InvalidArgument("num_thetas must be >= 8");
  const int d = h0.dim();
  SpectrumSweep sweep{std::vector<double>(num_thetas),
                      Eigen::MatrixXd(num_thetas, d),
                      Eigen::VectorXd(num_thetas), h0, h1};
  for (int j = 0; j < num_thetas; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / num_thetas;
    sweep.thetas[j] = theta;
    const RealVector vals = eigvals_hermitian(HermitianOperator(
        std::cos(theta) * h0.mat() + std::sin(theta) * h1.mat()));
    sweep.levels.row(j) = vals;
    sweep.ground_gap(j) =
        d > 1 ? vals(1) - vals(0) : std::numeric_limits<double>::infinity();
  }
  return sweep;
}

struct GroundCrossing {
  double theta = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct TransitionReport {
  std::vector<GroundCrossing> crossings;
  std::vector<FlatPart> flat_faces;
};

namespace phase_detail {

inline Eigen::MatrixXcd sweep_matrix(const SpectrumSweep& sweep, double theta) {
  return std::cos(theta) * sweep.h0.mat() + std::sin(theta) * sweep.h1.mat();
}

inline double gap_at(const SpectrumSweep& sweep, double theta) {
  const RealVector vals =
      eigvals_hermitian(HermitianOperator(sweep_matrix(sweep, theta)));
  return vals.size() > 1 ? vals(1) - vals(0)
                         : std::numeric_limits<double>::infinity();
}

/// (<H0>, <H1>) on the (assumed nondegenerate) ground state.
inline Eigen::Vector2d ground_point(const SpectrumSweep& sweep, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sweep_matrix(sweep, theta));
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eigensolver failed in crossing classification");
  const Vector ground = solver.eigenvectors().col(0);
  return {(ground.adjoint() * sweep.h0.mat() * ground)(0).real(),
          (ground.adjoint() * sweep.h1.mat() * ground)(0).real()};
}

struct RefinedMinimum {
  double theta = 0.0;
  double width = 0.0;  // final bracket width
};

inline RefinedMinimum golden_min(const SpectrumSweep& sweep, double lo,
                                 double hi) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = gap_at(sweep, c);
  double gd = gap_at(sweep, d);
  while (b - a > 1e-10) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = gap_at(sweep, c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = gap_at(sweep, d);
    }
  }
  return {0.5 * (a + b), b - a};
}

}  // namespace phase_detail

/// Locates angles where the ground level becomes degenerate and separates
/// first-order crossings from flat-face passages. At a crossing the ground
/// state is locked to one branch over a whole interval of angles (the range
/// has a vertex there), so the ground expectation point is stationary on at
/// least one side of the critical angle. Passing through a flat face moves
/// the expectation point continuously on both sides and is reported among
/// flat_faces (also populated via the classification sweep) instead.
inline TransitionReport detect_ground_crossings(
    const SpectrumSweep& sweep, double gap_tol = kDefaultGapTol) {
  using namespace phase_detail;
  TransitionReport report;
  const int n = static_cast<int>(sweep.thetas.size());
  const int d = static_cast<int>(sweep.levels.cols());
  if (d < 2) return report;

  const double width_scale =
      1.0 + (sweep.levels.col(d - 1) - sweep.levels.col(0)).maxCoeff();
  const double refine_gate = 0.25 * width_scale;
  const double accept_tol = gap_tol * width_scale;
  const double step = 2.0 * std::numbers::pi / n;

  for (int j = 0; j < n; ++j) {
    const double g = sweep.ground_gap(j);
    const double g_prev = sweep.ground_gap((j + n - 1) % n);
    const double g_next = sweep.ground_gap((j + 1) % n);
    if (g > refine_gate || g > g_prev || g > g_next) continue;
    const RefinedMinimum refined =
        golden_min(sweep, sweep.thetas[j] - step, sweep.thetas[j] + step);
    const double theta = refined.theta;
    if (gap_at(sweep, theta) > accept_tol) continue;

    // derivative-jump requirement: the tangential operator must split the
    // degenerate pair, otherwise the levels only touch
    const EigenspaceProjector ground = lambda_max_projector(
        HermitianOperator(-sweep_matrix(sweep, theta)), gap_tol);
    const Matrix tangential = -std::sin(theta) * sweep.h0.mat() +
                              std::cos(theta) * sweep.h1.mat();
    const RealVector tvals =
        eigvals_hermitian(compress(HermitianOperator(tangential), ground.basis));
    if (tvals(tvals.size() - 1) - tvals(0) <= 100.0 * accept_tol) continue;

    // vertex signature: expectation point stationary on one side
    const double delta = 1e-2;
    const double plateau_tol = 1e-9 * width_scale;
    const bool left_locked =
        (ground_point(sweep, theta - delta) - ground_point(sweep, theta - 2 * delta))
            .norm() <= plateau_tol;
    const bool right_locked =
        (ground_point(sweep, theta + delta) - ground_point(sweep, theta + 2 * delta))
            .norm() <= plateau_tol;
    if (!left_locked && !right_locked) continue;

    double canonical = std::fmod(theta, 2.0 * std::numbers::pi);
    if (canonical < 0.0) canonical += 2.0 * std::numbers::pi;
    bool duplicate = false;
    for (const auto& existing : report.crossings) {
      if (std::abs(existing.theta - canonical) <= 1e-6 ||
          std::abs(std::abs(existing.theta - canonical) -
                   2.0 * std::numbers::pi) <= 1e-6)
        duplicate = true;
    }
    if (!duplicate)
      report.crossings.push_back({canonical, canonical - refined.width,
                                  canonical + refined.width});
  }
  std::sort(report.crossings.begin(), report.crossings.end(),
            [](const GroundCrossing& a, const GroundCrossing& b) {
              return a.theta < b.theta;
            });

  report.flat_faces =
      detect_flat_parts(ObservableSet({sweep.h0, sweep.h1}), gap_tol);
  return report;
}

/// lambda_min(H0 + a H1).
inline double ground_energy(const HermitianOperator& h0,
                            const HermitianOperator& h1, double a) {
  if (h0.dim() != h1.dim()) throw DimensionMismatch("ground_energy dims");
  return eigvals_hermitian(HermitianOperator(h0.mat() + a * h1.mat()))(0);
}

/// Hellmann-Feynman derivative dE/da = <H1> on the ground state; only valid
/// away from ground degeneracies.
inline double ground_slope(const HermitianOperator& h0,
                           const HermitianOperator& h1, double a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h0.mat() + a * h1.mat());
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eigensolver failed in ground_slope");
  const Vector ground = solver.eigenvectors().col(0);
  return (ground.adjoint() * h1.mat() * ground)(0).real();
}

struct KnownEnergy {
  double a = 0.0;
  double energy = 0.0;
  std::optional<double> slope;  // absent near a degenerate ground level
};

/// Evaluates E and, where the ground gap exceeds 10 * gap_tol (relative to
/// the spectral width), the tangent slope at each requested coupling.
inline std::vector<KnownEnergy> evaluate_known_energies(
    const HermitianOperator& h0, const HermitianOperator& h1,
    const std::vector<double>& couplings, double gap_tol = kDefaultGapTol) {
  std::vector<KnownEnergy> known;
  known.reserve(couplings.size());
  for (double a : couplings) {
    const RealVector vals =
        eigvals_hermitian(HermitianOperator(h0.mat() + a * h1.mat()));
    KnownEnergy entry{a, vals(0), std::nullopt};
    const double width = vals(vals.size() - 1) - vals(0);
    if (vals.size() > 1 && vals(1) - vals(0) > 10.0 * gap_tol * (1.0 + width))
      entry.slope = ground_slope(h0, h1, a);
    known.push_back(entry);
  }
  return known;
}

struct EnergyBounds {
  double lower = 0.0;
  double upper = 0.0;  // +infinity when no tangent information exists
};

/// Two-sided bound on the ground energy at query_a from known samples of the
/// concave function E(a): the chord between the bracketing samples bounds
/// from below, tangent lines bound from above.
inline EnergyBounds energy_bounds(std::vector<KnownEnergy> known,
                                  double query_a) {
  if (known.empty()) throw InvalidArgument("energy_bounds needs known points");
  std::sort(known.begin(), known.end(),
            [](const KnownEnergy& x, const KnownEnergy& y) { return x.a < y.a; });

  for (const auto& entry : known) {
    if (std::abs(entry.a - query_a) <= 1e-12)
      return {entry.energy, entry.energy};
  }

  const KnownEnergy* left = nullptr;
  const KnownEnergy* right = nullptr;
  for (const auto& entry : known) {
    if (entry.a <= query_a) left = &entry;
    if (entry.a >= query_a && right == nullptr) right = &entry;
  }
  if (left == nullptr || right == nullptr)
    throw QueryOutsideBracket(
        "query " + std::to_string(query_a) +
        " lies outside the convex hull of the known couplings");
  const double t = (query_a - left->a) / (right->a - left->a);
  EnergyBounds bounds;
  bounds.lower = (1.0 - t) * left->energy + t * right->energy;

  bounds.upper = std::numeric_limits<double>::infinity();
  for (const auto& entry : known) {
    if (!entry.slope) continue;
    bounds.upper = std::min(bounds.upper,
                            entry.energy + *entry.slope * (query_a - entry.a));
  }
  return bounds;
}

}  // namespace jnr
