#pragma once

#include <cstdint>

#include "cpsd/linalg.hpp"

namespace cpsd {

/// m points of common dimension d, stored one per column, with cached norms.
struct PointSet {
  Matrix points;  // d x m
  Vector norms;   // ||x_i||_2

  static PointSet from_columns(Matrix columns);

  Index dim() const { return points.rows(); }
  Index count() const { return points.cols(); }
};

/// Result of a verified random projection. target_dim is the formula value
/// r = jl_dimension(m, eps); when the ambient dimension d is already <= r
/// the map is the identity and `projected` keeps dimension d.
struct JlResult {
  Index target_dim = 0;
  Matrix projected;  // output_dim x m
  double max_violation_ratio = 0.0;
  int retries = 0;
  bool identity = false;

  Index output_dim() const { return projected.rows(); }
};

/// Outcome of checking the pairwise distortion inequality; worst pair is
/// the one maximizing lhs/rhs.
struct JlCheck {
  bool ok = false;
  Index i = 0;
  Index j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double max_ratio = 0.0;
};

/// r = ceil(8 ln(m+1) / eps^2). Requires m >= 1 and 0 < eps < 1.
Index jl_dimension(std::int64_t m, double eps);

/// Checks, for every pair i <= j (the inequality is symmetric, diagonal
/// included):
///   |x_i^t x_j - y_i^t y_j| <= eps (||x_i||^2 + ||x_j||^2 - x_i^t x_j)
/// where y = projected points.
JlCheck verify_jl(const PointSet& pts, const JlResult& result, double eps,
                  int threads = 1);

/// Random linear map to dimension r = jl_dimension(m, eps) with the pairwise
/// inner-product distortion above verified to hold for all pairs; entries of
/// the map are iid N(0, 1/r). Draws are retried with fresh randomness until
/// the check passes; throws RetryExhaustedError (carrying the best draw's
/// max violation ratio) when the budget runs out. If d <= r the identity
/// embedding is returned with zero distortion.
JlResult jl_project(const PointSet& pts, double eps, int retry_budget = 64,
                    std::uint64_t rng_seed = 0, int threads = 1);

}  // namespace cpsd
