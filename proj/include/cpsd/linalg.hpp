#pragma once

#include <Eigen/Core>

namespace cpsd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default numerical tolerances. All are relative to the dominant scale of
/// the quantity they guard (largest eigenvalue magnitude or largest entry),
/// with a floor of 1 so that zero matrices do not make every check vacuous.
struct Tol {
  static constexpr double sym = 1e-10;            // symmetry of inputs
  static constexpr double psd = 1e-9;             // negative-eigenvalue slack
  static constexpr double rank = 1e-9;            // eigenvalue cutoff for rank
  static constexpr double gram = 1e-8;            // entrywise Gram consistency
  static constexpr double trace_rel = 1e-9;       // trace preservation
  static constexpr double residual_mass = 1e-7;   // discarded block mass
  static constexpr double jacobi = 1e-12;         // off-diagonal mass target
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Spectral decomposition of a symmetric matrix: values sorted descending
/// (ties keep the pre-sort order), vectors orthonormal, column k paired with
/// values[k].
struct EigenDecomp {
  Vector values;
  Matrix vectors;
};

/// Complex Hermitian matrix stored as symmetric real part + antisymmetric
/// imaginary part.
struct HermMatrix {
  Matrix real_part;
  Matrix imag_part;
};

/// Throws std::invalid_argument unless a is square and symmetric within
/// tol * max(1, max |entry|).
void require_symmetric(const Matrix& a, double tol = Tol::sym);

/// Sum_{ij} a_ij * b_ij = tr(ba). Throws on side mismatch.
double trace_inner(const Matrix& a, const Matrix& b);

/// sqrt(trace_inner(a, a)).
double frobenius(const Matrix& a);

/// Eigendecomposition by cyclic Jacobi rotations. Converges when the
/// off-diagonal Frobenius mass drops below tol * ||a||_F, with a hard budget
/// of max_sweeps full sweeps; throws ConvergenceError (message carries the
/// residual) if the budget is exhausted first. Deterministic for fixed input.
EigenDecomp sym_eig(const Matrix& a, double tol = Tol::jacobi,
                    int max_sweeps = kJacobiMaxSweeps);

/// True iff the smallest eigenvalue is >= -tol * max(1, |lambda_max|).
bool is_psd(const Matrix& a, double tol = Tol::psd);

/// Number of eigenvalues with |lambda| > tol * max(1, |lambda_max|).
Index numerical_rank(const Matrix& a, double tol = Tol::rank);

/// Eigenvalues clipped at zero: entries in [-tol*scale, 0) become 0.
/// Genuinely negative eigenvalues are left alone (callers psd-check first).
Vector clip_negative_eigenvalues(const Vector& values, double tol = Tol::psd);

/// [[a, 0], [0, b]]; psd whenever both blocks are.
Matrix block_diag_sum(const Matrix& a, const Matrix& b);

/// The isometry H^d -> S^{2d},
///   M |-> (1/sqrt(2)) [[Re M, -Im M], [Im M, Re M]].
/// Preserves positive semidefiniteness and real trace inner products:
/// trace_inner(embed(M), embed(N)) = Re tr(MN) for Hermitian M, N.
Matrix hermitian_embed(const HermMatrix& m, double tol = Tol::sym);

}  // namespace cpsd
