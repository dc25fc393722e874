#pragma once

#include <cstdint>
#include <vector>

#include "cpsd/linalg.hpp"

namespace cpsd {

/// How to pick the convex combination of spectraplex atoms.
///   sampling      Maurey empirical mean over the eigenvalue distribution,
///                 resampled until the error check passes.
///   greedy        Frank-Wolfe with exact line search; deterministic.
///   auto_fallback sampling first, greedy after the retry budget.
enum class Strategy { sampling, greedy, auto_fallback };

/// Which path produced the result ("exact" = input already within the atom
/// budget and returned unchanged).
enum class StrategyUsed { sampling, greedy, exact };

struct CarathResult {
  Matrix approx;               // psd, same side and trace as the input
  Index support_size = 0;      // distinct rank-1 atoms combined
  double achieved_error = 0.0; // Frobenius distance to the input
  StrategyUsed strategy_used = StrategyUsed::exact;
  int retries = 0;
};

/// ceil(trace^2 / eps^2) atoms suffice for an eps-close trace-preserving
/// psd approximation; 0 when trace is 0. Throws on eps <= 0 or trace < 0.
std::int64_t carath_bound(double trace, double eps);

/// Frank-Wolfe over conv{tr(a) uu^t : ||u|| = 1} minimizing the squared
/// Frobenius distance to a, with exact line search. Stops when the error
/// drops below eps or max_atoms atoms have been introduced. errors[k] is the
/// distance after k+1 atoms (nonincreasing).
struct GreedyTrace {
  Matrix approx;
  std::vector<double> errors;
  Index support_size = 0;
};
GreedyTrace greedy_spectraplex_fit(const Matrix& a, double eps,
                                   std::int64_t max_atoms);

/// Trace-preserving low-rank psd approximation of a psd matrix:
/// returns psd approx with tr(approx) = tr(a), ||a - approx||_F < eps and
/// support_size <= carath_bound(tr(a), eps).
///
/// If rank(a) already fits the atom budget the input is returned exactly.
/// Sampling failures are retried with fresh randomness up to retry_budget
/// times; auto_fallback then switches to greedy. Throws RetryExhaustedError
/// (with the best error seen) when every attempt misses, and
/// std::invalid_argument when a is not psd or eps <= 0.
CarathResult low_rank_psd_approx(const Matrix& a, double eps,
                                 Strategy strategy = Strategy::auto_fallback,
                                 int retry_budget = 64,
                                 std::uint64_t rng_seed = 0);

}  // namespace cpsd
