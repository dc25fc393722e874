#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsd/caratheodory.hpp"
#include "cpsd/gram.hpp"

namespace cpsd {

enum class Mode { stage1_only, stage2_full, auto_select };

struct ApproxParams {
  double eps = 0.0;
  Mode mode = Mode::auto_select;
  bool cp_mode = false;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::auto_fallback;
  int carath_retry_budget = 64;
  int jl_retry_budget = 64;
  int threads = 1;  // 0 = all hardware threads
};

struct RankBounds {
  std::int64_t first = 0;   // n ceil(9 L l^2 / (2 eps^2))
  std::int64_t second = 0;  // ceil((6l)^4 ln(n ceil(18 L l^2 / eps^2) + 1) / eps^2)
};

/// eps1 = sqrt(L) (sqrt(1 + eps/(2L)) - 1); satisfies
/// 2 eps1 sqrt(L) + eps1^2 = eps/2 exactly. Requires eps > 0, L > 0.
double epsilon1(double big_l, double eps);

/// eps2 = (sqrt(1 + eps/(2 l^2)) - 1) / 3; satisfies
/// (6 eps2 + 9 eps2^2) l^2 = eps/2 exactly. Requires eps > 0, l > 0.
double epsilon2(double ell, double eps);

/// The bound sqrt(1+x) <= 1 + x/2 - x^2/9, valid on [0, 1/4]; exposed as a
/// testable predicate. Throws outside the interval.
bool sqrt_ineq_check(double x);

/// Both cpsd-rank upper bounds for an eps-approximation of an n x n target
/// whose witness has constants (ell, big_l).
RankBounds rank_bounds(std::int64_t n, double ell, double big_l, double eps);

/// Smallest n for which the second (logarithmic) bound drops below n;
/// the regime where projection beats the identity witness.
std::int64_t crossover_size(double eps, double ell = 1.0, double big_l = 1.0);

struct Stage1Metrics {
  double budget = 0.0;          // entrywise error this stage may spend
  double eps1 = 0.0;            // per-factor Frobenius budget
  std::int64_t rank_cap = 0;    // ceil(ell^2 / eps1^2)
  double max_entry_error = 0.0; // measured vs the input Gram matrix
  std::vector<Index> factor_ranks;
  std::vector<Index> factor_support;
  int retries = 0;              // summed over factors
  std::vector<std::string> warnings;
};

struct Stage2Metrics {
  double budget = 0.0;
  double eps2 = 0.0;
  Index point_count = 0;        // eigenvectors collected across factors
  Index target_dim = 0;         // r from the JL formula
  Index output_side = 0;
  double max_entry_error = 0.0; // measured vs the stage-1 Gram matrix
  int retries = 0;
  bool identity_projection = false;
};

struct ApproxReport {
  Matrix output;        // N = gram(output_rep)
  GramRep output_rep;
  double achieved_error = 0.0;  // max entrywise |M - N|
  Index rep_side = 0;
  std::int64_t bound_first = 0;
  std::int64_t bound_second = 0;
  double eps = 0.0;
  Mode mode_requested = Mode::auto_select;
  Mode mode_used = Mode::stage1_only;
  bool cp = false;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double ell = 0.0;
  double big_l = 0.0;
  Stage1Metrics stage1;
  std::optional<Stage2Metrics> stage2;
  std::vector<std::string> warnings;
};

/// Carathéodory stage: each witness factor is replaced by a trace-preserving
/// low-rank psd approximation within eps1' = sqrt(L)(sqrt(1+budget/L) - 1),
/// so the Gram matrix moves by at most `eps_budget` entrywise (verified).
std::pair<GramRep, Stage1Metrics> stage1(const CpsdInstance& inst,
                                         double eps_budget,
                                         const ApproxParams& params);

/// Johnson-Lindenstrauss stage: projects the normalized eigenvectors of all
/// stage-1 factors to r = jl_dimension(point count, eps2) dimensions with
/// eps2 = epsilon2(ell, 2 * eps_budget) and rebuilds the factors from the
/// projected vectors; the Gram matrix moves by at most `eps_budget`
/// entrywise (verified).
std::pair<GramRep, Stage2Metrics> stage2(const GramRep& rep1,
                                         const CpsdInstance& inst,
                                         double eps_budget,
                                         const ApproxParams& params);

/// The full construction. Requires 0 < eps < min(ell^2, big_l)/2; auto mode
/// runs whichever stage combination has the smaller rank bound (ties prefer
/// the deterministic stage-1-only path). The returned witness certifies
/// rep_side, and max entrywise |M - N| < eps is verified, never inferred.
ApproxReport approximate(const CpsdInstance& inst, const ApproxParams& params);

/// Completely positive mode: all witness factors must be diagonal; the
/// stage-1-only path then preserves diagonality end to end, so the output
/// witness certifies complete positivity. Requires only eps > 0.
ApproxReport approximate_cp(const CpsdInstance& inst,
                            const ApproxParams& params);

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

}  // namespace cpsd
