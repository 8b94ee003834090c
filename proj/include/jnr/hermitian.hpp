#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "jnr/errors.hpp"

namespace jnr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default relative tolerance for grouping near-degenerate top eigenvalues.
/// Flat boundary parts hinge on this, so every module shares the same
/// constant; the CLI overrides it with --gap-tol.
inline constexpr double kDefaultGapTol = 1e-8;

inline constexpr double kHermiticityTol = 1e-10;

enum class Subsystem { first, second };

namespace detail {

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Dense complex Hermitian operator. Input is accepted when
/// max|H - H^dag| <= 1e-10 * (1 + max|H|) and then symmetrized to
/// (H + H^dag)/2, so text-format rounding is tolerated but genuinely
/// non-Hermitian input is rejected.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 1) {
      throw NonHermitianInput("operator must be a square matrix of dim >= 1");
    }
    const double scale = detail::max_abs(entries);
    const double deviation = detail::max_abs(entries - entries.adjoint());
    if (deviation > kHermiticityTol * (1.0 + scale)) {
      throw NonHermitianInput("max |H - H^dag| = " + std::to_string(deviation) +
                              " exceeds tolerance " +
                              std::to_string(kHermiticityTol * (1.0 + scale)));
    }
    entries_ = 0.5 * (entries + entries.adjoint());
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& mat() const { return entries_; }

  HermitianOperator scaled(double factor) const {
    return HermitianOperator(factor * entries_);
  }

 private:
  Matrix entries_;
};

inline HermitianOperator operator+(const HermitianOperator& a,
                                   const HermitianOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("operator sum requires equal dims");
  return HermitianOperator(a.mat() + b.mat());
}

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  /// Fully validating constructor: Hermiticity, trace 1 within 1e-12 and
  /// minimum eigenvalue >= -1e-10 are all checked.
  explicit DensityMatrix(Matrix entries)
      : DensityMatrix(HermitianOperator(std::move(entries))) {}

  explicit DensityMatrix(const HermitianOperator& op) : entries_(op.mat()) {
    const double tr = entries_.trace().real();
    if (std::abs(tr - 1.0) > 1e-12) {
      throw InvalidArgument("density matrix trace " + std::to_string(tr) +
                            " is not 1 within 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_,
                                                 Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NoConvergence("eigensolver failed on density matrix check");
    if (solver.eigenvalues()(0) < -1e-10) {
      throw InvalidArgument("density matrix has eigenvalue " +
                            std::to_string(solver.eigenvalues()(0)) +
                            " below -1e-10");
    }
  }

  /// Wraps a matrix known to be PSD by construction (Gibbs weights, convex
  /// mixtures of projectors, partial traces of valid states). Trace is still
  /// renormalized against rounding drift.
  static DensityMatrix unchecked(Matrix entries) {
    DensityMatrix rho;
    const double tr = entries.trace().real();
    rho.entries_ = entries / tr;
    return rho;
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& mat() const { return entries_; }

  /// rho = |psi><psi| for a (normalized) state vector.
  static DensityMatrix pure(const Vector& psi) {
    const Vector v = psi / psi.norm();
    return unchecked(v * v.adjoint());
  }

  static DensityMatrix maximally_mixed(int dim) {
    return unchecked(Matrix::Identity(dim, dim));
  }

 private:
  DensityMatrix() = default;
  Matrix entries_;
};

/// Full spectrum with orthonormal eigenbasis, eigenvalues ascending.
struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, orthonormal, matching order

  double lambda_min() const { return eigenvalues(0); }
  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
  double spectral_width() const { return lambda_max() - lambda_min(); }
};

/// Orthogonal projector onto an eigenspace, with its orthonormal basis.
struct EigenspaceProjector {
  Matrix projector;
  double eigenvalue = 0.0;
  int multiplicity = 0;
  Matrix basis;  // dim x multiplicity, orthonormal columns
};

inline EigenDecomposition eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.mat());
  if (solver.info() != Eigen::Success)
    throw NoConvergence("Hermitian eigensolver did not converge (dim " +
                        std::to_string(h.dim()) + ")");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Eigenvalues only; cheaper when the basis is not needed.
inline RealVector eigvals_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("Hermitian eigensolver did not converge (dim " +
                        std::to_string(h.dim()) + ")");
  return solver.eigenvalues();
}

/// Projector onto the top eigenspace. Multiplicity counts every eigenvalue
/// within gap_tol * (1 + spectral width) of the maximum.
inline EigenspaceProjector lambda_max_projector(
    const EigenDecomposition& eig, double gap_tol = kDefaultGapTol) {
  const int d = static_cast<int>(eig.eigenvalues.size());
  const double top = eig.lambda_max();
  const double window = gap_tol * (1.0 + eig.spectral_width());
  int first = d - 1;
  while (first > 0 && top - eig.eigenvalues(first - 1) <= window) --first;
  const int m = d - first;
  EigenspaceProjector p;
  p.eigenvalue = top;
  p.multiplicity = m;
  p.basis = eig.eigenvectors.rightCols(m);
  p.projector = p.basis * p.basis.adjoint();
  return p;
}

inline EigenspaceProjector lambda_max_projector(
    const HermitianOperator& h, double gap_tol = kDefaultGapTol) {
  if (gap_tol <= 0.0) throw InvalidArgument("gap_tol must be positive");
  return lambda_max_projector(eig_hermitian(h), gap_tol);
}

/// Tr(rho F). The result of the Hilbert-Schmidt pairing of two Hermitian
/// matrices is real; the imaginary rounding residue is checked, then dropped.
inline double expectation(const HermitianOperator& f, const DensityMatrix& rho) {
  if (f.dim() != rho.dim())
    throw DimensionMismatch("expectation: operator dim " +
                            std::to_string(f.dim()) + " vs state dim " +
                            std::to_string(rho.dim()));
  const Complex tr = f.mat().conjugate().cwiseProduct(rho.mat()).sum();
  const double scale = 1.0 + f.mat().norm() * rho.mat().norm();
  if (std::abs(tr.imag()) > 1e-12 * scale) {
    throw InvalidArgument("expectation has imaginary residue " +
                          std::to_string(tr.imag()));
  }
  return tr.real();
}

/// <psi|F|psi> for a normalized pure state.
inline double expectation(const HermitianOperator& f, const Vector& psi) {
  if (f.dim() != psi.size())
    throw DimensionMismatch("expectation: operator dim vs vector size");
  return (psi.adjoint() * f.mat() * psi)(0).real();
}

/// exp(-beta H)/Z via the eigenbasis. The largest exponent is factored out
/// before exponentiation so beta up to ~1e4 cannot overflow.
inline DensityMatrix gibbs_state(const HermitianOperator& h, double beta) {
  if (!(beta >= 0.0) || std::isnan(beta))
    throw InvalidArgument("gibbs_state requires finite beta >= 0");
  if (beta == 0.0) return DensityMatrix::maximally_mixed(h.dim());
  const EigenDecomposition eig = eig_hermitian(h);
  const RealVector exponents = -beta * eig.eigenvalues;
  const double shift = exponents.maxCoeff();
  RealVector weights = (exponents.array() - shift).exp();
  weights /= weights.sum();
  const Matrix rho = eig.eigenvectors * weights.asDiagonal() *
                     eig.eigenvectors.adjoint();
  return DensityMatrix::unchecked(rho);
}

/// Contraction over the discarded tensor factor of a d_a x d_b bipartition.
inline Matrix partial_trace_entries(const Matrix& m, int dim_a, int dim_b,
                                    Subsystem keep) {
  if (m.rows() != static_cast<long>(dim_a) * dim_b || m.rows() != m.cols())
    throw DimensionMismatch("partial_trace: dim != d_a * d_b");
  if (keep == Subsystem::first) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int k = 0; k < dim_a; ++k) {
        Complex sum = 0.0;
        for (int j = 0; j < dim_b; ++j) sum += m(i * dim_b + j, k * dim_b + j);
        out(i, k) = sum;
      }
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int l = 0; l < dim_b; ++l) {
      Complex sum = 0.0;
      for (int i = 0; i < dim_a; ++i) sum += m(i * dim_b + j, i * dim_b + l);
      out(j, l) = sum;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a,
                                   int dim_b, Subsystem keep) {
  return DensityMatrix::unchecked(
      partial_trace_entries(rho.mat(), dim_a, dim_b, keep));
}

/// Transposition of one tensor factor. Involutive; preserves Hermiticity and
/// trace but not positivity, which is what makes it an entanglement test.
inline HermitianOperator partial_transpose(const HermitianOperator& x,
                                           int dim_a, int dim_b,
                                           Subsystem which) {
  const Matrix& m = x.mat();
  if (m.rows() != static_cast<long>(dim_a) * dim_b)
    throw DimensionMismatch("partial_transpose: dim != d_a * d_b");
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        for (int l = 0; l < dim_b; ++l) {
          const int row = i * dim_b + j;
          const int col = k * dim_b + l;
          const int src_row = which == Subsystem::first ? k * dim_b + j
                                                        : i * dim_b + l;
          const int src_col = which == Subsystem::first ? i * dim_b + l
                                                        : k * dim_b + j;
          out(row, col) = m(src_row, src_col);
        }
  return HermitianOperator(out);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline HermitianOperator kron(const HermitianOperator& a,
                              const HermitianOperator& b) {
  return HermitianOperator(kron(a.mat(), b.mat()));
}

/// Restriction of F to span(basis): the m x m matrix <b_i|F|b_j>.
inline HermitianOperator compress(const HermitianOperator& f,
                                  const Matrix& basis) {
  if (basis.rows() != f.dim())
    throw DimensionMismatch("compress: basis rows must match operator dim");
  const Matrix gram = basis.adjoint() * basis;
  const double deviation =
      detail::max_abs(gram - Matrix::Identity(basis.cols(), basis.cols()));
  if (deviation > 1e-10)
    throw NonOrthonormalBasis("basis deviates from orthonormality by " +
                              std::to_string(deviation));
  return HermitianOperator(basis.adjoint() * f.mat() * basis);
}

/// Frequently used fixed operators. sigma_y follows the sign printed in the
/// source material ([[0, i], [-i, 0]]); it is Hermitian with spectrum +-1,
/// so every numerical-range statement is unchanged up to a reflection.
namespace paulis {

inline Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, 1), Complex(0, -1), 0;
  return m;
}

inline Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix id(int dim = 2) { return Matrix::Identity(dim, dim); }

}  // namespace paulis

}  // namespace jnr
