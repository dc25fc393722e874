#include "cpsd/jl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cpsd/errors.hpp"
#include "cpsd/parallel.hpp"
#include "cpsd/rng.hpp"

namespace cpsd {

PointSet PointSet::from_columns(Matrix columns) {
  if (columns.rows() < 1 || columns.cols() < 1) {
    throw std::invalid_argument("PointSet: need dimension >= 1 and m >= 1");
  }
  PointSet out;
  out.norms = columns.colwise().norm();
  out.points = std::move(columns);
  return out;
}

Index jl_dimension(std::int64_t m, double eps) {
  if (m < 1) throw std::invalid_argument("jl_dimension: m must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("jl_dimension: eps must be in (0, 1)");
  }
  double r = std::ceil(8.0 * std::log(static_cast<double>(m) + 1.0) /
                       (eps * eps));
  return static_cast<Index>(r);
}

JlCheck verify_jl(const PointSet& pts, const JlResult& result, double eps,
                  int threads) {
  const Index m = pts.count();
  if (result.projected.cols() != m) {
    throw std::invalid_argument("verify_jl: point counts differ");
  }
  Matrix original = pts.points.transpose() * pts.points;
  Matrix mapped = result.projected.transpose() * result.projected;

  struct Worst {
    double ratio = -1.0;
    Index i = 0, j = 0;
    double lhs = 0.0, rhs = 0.0;
    bool ok = true;
  };
  std::vector<Worst> per_row(static_cast<std::size_t>(m));
  parallel_for(m, threads, [&](std::int64_t row) {
    Index i = static_cast<Index>(row);
    Worst w;
    for (Index j = i; j < m; ++j) {
      double lhs = std::abs(original(i, j) - mapped(i, j));
      double rhs = eps * (pts.norms(i) * pts.norms(i) +
                          pts.norms(j) * pts.norms(j) - original(i, j));
      if (lhs > rhs) w.ok = false;
      double ratio;
      if (lhs == 0.0) {
        ratio = 0.0;
      } else if (rhs == 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        ratio = lhs / rhs;
      }
      if (ratio > w.ratio) {
        w.ratio = ratio;
        w.i = i;
        w.j = j;
        w.lhs = lhs;
        w.rhs = rhs;
      }
    }
    per_row[static_cast<std::size_t>(row)] = w;
  });

  JlCheck out;
  out.ok = true;
  out.max_ratio = -1.0;
  for (const Worst& w : per_row) {
    if (!w.ok) out.ok = false;
    if (w.ratio > out.max_ratio) {
      out.max_ratio = w.ratio;
      out.i = w.i;
      out.j = w.j;
      out.lhs = w.lhs;
      out.rhs = w.rhs;
    }
  }
  out.max_ratio = std::max(out.max_ratio, 0.0);
  return out;
}

JlResult jl_project(const PointSet& pts, double eps, int retry_budget,
                    std::uint64_t rng_seed, int threads) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("jl_project: eps must be in (0, 1)");
  }
  const Index d = pts.dim();
  const Index m = pts.count();
  const Index r = jl_dimension(m, eps);

  if (d <= r) {
    JlResult out;
    out.target_dim = r;
    out.projected = pts.points;
    out.identity = true;
    out.max_violation_ratio = 0.0;
    return out;
  }

  Rng rng(rng_seed);
  double best_ratio = std::numeric_limits<double>::infinity();
  int attempts = 0;
  for (attempts = 0; attempts < retry_budget; ++attempts) {
    Rng draw = rng.split(static_cast<std::uint64_t>(attempts));
    Matrix q(r, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    for (Index rr = 0; rr < r; ++rr) {
      for (Index cc = 0; cc < d; ++cc) {
        q(rr, cc) = scale * draw.gaussian();
      }
    }
    JlResult candidate;
    candidate.target_dim = r;
    candidate.projected = q * pts.points;
    candidate.retries = attempts;
    JlCheck check = verify_jl(pts, candidate, eps, threads);
    best_ratio = std::min(best_ratio, check.max_ratio);
    if (check.ok) {
      candidate.max_violation_ratio = check.max_ratio;
      return candidate;
    }
  }
  std::ostringstream msg;
  msg << "jl_project: no draw satisfied the distortion bound in "
      << retry_budget << " attempts (best max ratio " << best_ratio << ")";
  throw RetryExhaustedError(msg.str(), best_ratio, attempts);
}

}  // namespace cpsd
