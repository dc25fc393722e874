#include "cpsd/caratheodory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cpsd/errors.hpp"
#include "cpsd/rng.hpp"

namespace cpsd {

std::int64_t carath_bound(double trace, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("carath_bound: eps must be > 0");
  if (trace < 0.0) {
    throw std::invalid_argument("carath_bound: trace must be >= 0");
  }
  if (trace == 0.0) return 0;
  double k = std::ceil((trace * trace) / (eps * eps));
  if (k >= 9.2e18) throw std::overflow_error("carath_bound: bound overflows");
  return static_cast<std::int64_t>(k);
}

namespace {

GreedyTrace greedy_fit_impl(const Matrix& a, double eps,
                            std::int64_t max_atoms) {
  const double tr = a.trace();
  GreedyTrace out;
  out.approx = Matrix::Zero(a.rows(), a.cols());
  if (max_atoms <= 0) return out;

  Matrix x = Matrix::Zero(a.rows(), a.cols());
  for (std::int64_t it = 0; it < max_atoms; ++it) {
    Matrix residual = a - x;
    EigenDecomp ed = sym_eig(residual);
    Vector v = ed.vectors.col(0);  // most positive residual direction
    Matrix atom = tr * (v * v.transpose());
    if (it == 0) {
      x = atom;
    } else {
      Matrix dir = atom - x;
      double denom = dir.squaredNorm();
      double gamma = denom > 0.0 ? trace_inner(a - x, dir) / denom : 0.0;
      gamma = std::clamp(gamma, 0.0, 1.0);
      if (gamma == 0.0) {
        break;  // stationary; further atoms cannot improve
      }
      x += gamma * dir;
    }
    ++out.support_size;
    out.errors.push_back((a - x).norm());
    if (out.errors.back() < eps) break;
  }
  out.approx = 0.5 * (x + x.transpose());
  return out;
}

struct SamplingAttempt {
  Matrix approx;
  Index support = 0;
  double error = std::numeric_limits<double>::infinity();
};

SamplingAttempt sample_once(const Matrix& a, const EigenDecomp& ed,
                            const Vector& clipped, double tr,
                            std::int64_t k, Rng& rng) {
  const Index d = a.rows();
  std::vector<double> cumulative(static_cast<std::size_t>(d));
  double run = 0.0;
  for (Index j = 0; j < d; ++j) {
    run += clipped(j);
    cumulative[static_cast<std::size_t>(j)] = run;
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (std::int64_t s = 0; s < k; ++s) {
    ++counts[rng.categorical(cumulative)];
  }

  Index support = 0;
  for (auto c : counts) {
    if (c > 0) ++support;
  }
  Matrix basis(d, support);
  Vector weights(support);
  Index col = 0;
  for (Index j = 0; j < d; ++j) {
    auto c = counts[static_cast<std::size_t>(j)];
    if (c == 0) continue;
    basis.col(col) = ed.vectors.col(j);
    weights(col) = static_cast<double>(c) * tr / static_cast<double>(k);
    ++col;
  }
  SamplingAttempt out;
  out.approx = basis * weights.asDiagonal() * basis.transpose();
  out.approx = 0.5 * (out.approx + out.approx.transpose()).eval();
  out.support = support;
  out.error = (a - out.approx).norm();
  return out;
}

}  // namespace

GreedyTrace greedy_spectraplex_fit(const Matrix& a, double eps,
                                   std::int64_t max_atoms) {
  require_symmetric(a);
  if (eps <= 0.0) {
    throw std::invalid_argument("greedy_spectraplex_fit: eps must be > 0");
  }
  return greedy_fit_impl(a, eps, max_atoms);
}

CarathResult low_rank_psd_approx(const Matrix& a, double eps,
                                 Strategy strategy, int retry_budget,
                                 std::uint64_t rng_seed) {
  if (eps <= 0.0) {
    throw std::invalid_argument("low_rank_psd_approx: eps must be > 0");
  }
  require_symmetric(a);
  EigenDecomp ed = sym_eig(a);
  const Index d = a.rows();
  double lambda_max = ed.values.size() ? ed.values.cwiseAbs().maxCoeff() : 0.0;
  if (ed.values(ed.values.size() - 1) < -Tol::psd * std::max(1.0, lambda_max)) {
    throw std::invalid_argument("low_rank_psd_approx: input is not psd");
  }

  double rank_cutoff = Tol::rank * std::max(1.0, lambda_max);
  Index rank = 0;
  for (Index j = 0; j < d; ++j) {
    if (std::abs(ed.values(j)) > rank_cutoff) ++rank;
  }
  if (rank == 0) {
    // Zero-trace psd input is the zero matrix; no atoms needed.
    CarathResult out;
    out.approx = Matrix::Zero(d, d);
    out.support_size = 0;
    out.achieved_error = a.norm();
    out.strategy_used = StrategyUsed::exact;
    if (out.achieved_error >= eps) {
      throw DiagnosticError(
          "low_rank_psd_approx: numerically-zero input exceeds eps");
    }
    return out;
  }

  const double tr = a.trace();
  const std::int64_t k_bound = carath_bound(tr, eps);
  if (rank <= k_bound) {
    // The eigendecomposition of a is itself a combination of rank atoms.
    CarathResult out;
    out.approx = a;
    out.support_size = rank;
    out.achieved_error = 0.0;
    out.strategy_used = StrategyUsed::exact;
    return out;
  }

  Vector clipped = clip_negative_eigenvalues(ed.values);

  double best_error = std::numeric_limits<double>::infinity();
  int attempts = 0;
  if (strategy == Strategy::sampling || strategy == Strategy::auto_fallback) {
    Rng rng(rng_seed);
    for (attempts = 0; attempts < retry_budget; ++attempts) {
      Rng draw = rng.split(static_cast<std::uint64_t>(attempts));
      SamplingAttempt att = sample_once(a, ed, clipped, tr, k_bound, draw);
      best_error = std::min(best_error, att.error);
      if (att.error < eps) {
        CarathResult out;
        out.approx = std::move(att.approx);
        out.support_size = att.support;
        out.achieved_error = att.error;
        out.strategy_used = StrategyUsed::sampling;
        out.retries = attempts;
        return out;
      }
    }
    if (strategy == Strategy::sampling) {
      std::ostringstream msg;
      msg << "low_rank_psd_approx: sampling missed eps = " << eps << " in "
          << retry_budget << " attempts (best error " << best_error << ")";
      throw RetryExhaustedError(msg.str(), best_error, attempts);
    }
  }

  GreedyTrace greedy = greedy_fit_impl(a, eps, k_bound);
  double greedy_error = (a - greedy.approx).norm();
  if (greedy_error < eps) {
    CarathResult out;
    out.approx = std::move(greedy.approx);
    out.support_size = greedy.support_size;
    out.achieved_error = greedy_error;
    out.strategy_used = StrategyUsed::greedy;
    out.retries = attempts;
    return out;
  }
  best_error = std::min(best_error, greedy_error);
  std::ostringstream msg;
  msg << "low_rank_psd_approx: failed to reach eps = " << eps
      << " within the atom budget " << k_bound << " (best error "
      << best_error << ")";
  throw RetryExhaustedError(msg.str(), best_error, attempts);
}

}  // namespace cpsd
