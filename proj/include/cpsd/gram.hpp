#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpsd/linalg.hpp"

namespace cpsd {

/// Ordered list of n psd matrices of common side d. Its Gram matrix
/// (pairwise trace inner products) is completely positive semidefinite by
/// construction, and d is a certified upper bound for the cpsd-rank.
struct GramRep {
  std::vector<Matrix> factors;

  Index size() const { return static_cast<Index>(factors.size()); }
  Index side() const { return factors.empty() ? 0 : factors.front().rows(); }

  /// Checks nonemptiness, common square side, symmetry, and psd-ness.
  void validate(double psd_tol = Tol::psd) const;
};

/// Side d of the given representation (an upper bound on the cpsd-rank of
/// its Gram matrix).
Index rep_side(const GramRep& rep);

/// max_i rank(factor_i); upper-bounds the Gram-cpsd-rank.
Index gram_rank_of_rep(const GramRep& rep, double tol = Tol::rank);

/// The n x n matrix of pairwise trace inner products of the factors.
Matrix gram(const GramRep& rep);

/// Rotates every factor into the eigenbasis of their sum and restricts to
/// the coordinates carrying its rank r = rank(sum of factors). The Gram
/// matrix is unchanged (rotation preserves trace inner products, and the
/// discarded block carries no mass); output factors are psd of side r, so
/// r <= min(d, sum_i rank(factor_i)).
///
/// An all-zero representation compresses to side-1 zero factors. Throws
/// DiagnosticError if a discarded block holds more than
/// Tol::residual_mass * ||factor||_F of Frobenius mass.
GramRep compress_rep(const GramRep& rep, double tol = Tol::rank);

/// A target matrix M together with a Gram-representation witness and the
/// two complexity constants of the approximation bounds:
///   ell   = max_i tr(A_i)   (witness-dependent, not determined by M)
///   big_l = max_i M_ii
struct CpsdInstance {
  Matrix target;
  GramRep witness;
  double ell = 0.0;
  double big_l = 0.0;

  // Provenance for serialization: generator family, seed, family parameters
  // as a compact JSON object.
  std::string meta_family = "custom";
  std::uint64_t meta_seed = 0;
  std::string meta_params = "{}";

  Index size() const { return target.rows(); }
};

/// Builds an instance from target + witness, recomputing ell and big_l and
/// validating the witness: factors psd, gram(witness) entrywise within
/// Tol::gram * max(1, max |target|) of target, target entrywise >= -tol.
CpsdInstance make_instance(Matrix target, GramRep witness);

/// lambda * M with witness sqrt(lambda) * A_i. Throws on lambda < 0.
CpsdInstance instance_scale(const CpsdInstance& inst, double lambda);

/// A + B with witness A_i (+) B_i (block-diagonal sums). Throws on size
/// mismatch.
CpsdInstance instance_add(const CpsdInstance& a, const CpsdInstance& b);

}  // namespace cpsd
