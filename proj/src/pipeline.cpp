#include "cpsd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpsd/errors.hpp"
#include "cpsd/jl.hpp"
#include "cpsd/parallel.hpp"
#include "cpsd/rng.hpp"

namespace cpsd {

namespace {

constexpr std::uint64_t kStage1Stream = 0x100000000ULL;
constexpr std::uint64_t kJlStream = 0x200000000ULL;

std::int64_t checked_ceil(double x, const char* what) {
  double c = std::ceil(x);
  if (!(c >= 0.0) || c >= 9.2e18) {
    throw std::overflow_error(std::string(what) + ": bound out of range");
  }
  return static_cast<std::int64_t>(c);
}

double max_entry_dev(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

double epsilon1(double big_l, double eps) {
  if (big_l <= 0.0) throw std::invalid_argument("epsilon1: L must be > 0");
  if (eps <= 0.0) throw std::invalid_argument("epsilon1: eps must be > 0");
  return std::sqrt(big_l) * (std::sqrt(1.0 + eps / (2.0 * big_l)) - 1.0);
}

double epsilon2(double ell, double eps) {
  if (ell <= 0.0) throw std::invalid_argument("epsilon2: ell must be > 0");
  if (eps <= 0.0) throw std::invalid_argument("epsilon2: eps must be > 0");
  return (std::sqrt(1.0 + eps / (2.0 * ell * ell)) - 1.0) / 3.0;
}

bool sqrt_ineq_check(double x) {
  if (x < 0.0 || x > 0.25) {
    throw std::invalid_argument("sqrt_ineq_check: x must be in [0, 1/4]");
  }
  return std::sqrt(1.0 + x) <= 1.0 + x / 2.0 - x * x / 9.0;
}

RankBounds rank_bounds(std::int64_t n, double ell, double big_l, double eps) {
  if (n < 1) throw std::invalid_argument("rank_bounds: n must be >= 1");
  if (ell <= 0.0 || big_l <= 0.0) {
    throw std::invalid_argument("rank_bounds: ell and L must be > 0");
  }
  if (eps <= 0.0) throw std::invalid_argument("rank_bounds: eps must be > 0");
  const double ell2 = ell * ell;
  const double eps2 = eps * eps;
  RankBounds out;
  std::int64_t per_factor =
      checked_ceil(9.0 * big_l * ell2 / (2.0 * eps2), "rank_bounds.first");
  out.first = n * per_factor;
  double inner =
      std::ceil(18.0 * big_l * ell2 / eps2) * static_cast<double>(n) + 1.0;
  double six_ell = 6.0 * ell;
  double second =
      std::pow(six_ell, 4) * std::log(inner) / eps2;
  out.second = checked_ceil(second, "rank_bounds.second");
  return out;
}

std::int64_t crossover_size(double eps, double ell, double big_l) {
  if (eps <= 0.0) throw std::invalid_argument("crossover_size: eps must be > 0");
  auto below = [&](std::int64_t n) {
    return rank_bounds(n, ell, big_l, eps).second < n;
  };
  std::int64_t hi = 1;
  while (!below(hi)) {
    if (hi > (std::int64_t{1} << 60)) {
      throw std::overflow_error("crossover_size: no crossover found");
    }
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // below(lo) is false (or lo == 0)
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::pair<GramRep, Stage1Metrics> stage1(const CpsdInstance& inst,
                                         double eps_budget,
                                         const ApproxParams& params) {
  if (eps_budget <= 0.0) {
    throw std::invalid_argument("stage1: eps budget must be > 0");
  }
  const Index n = inst.witness.size();
  Stage1Metrics metrics;
  metrics.budget = eps_budget;
  metrics.factor_ranks.resize(static_cast<std::size_t>(n));
  metrics.factor_support.resize(static_cast<std::size_t>(n));

  if (inst.big_l <= 0.0) {
    // Zero target: every factor has zero norm already.
    GramRep rep = inst.witness;
    for (Index i = 0; i < n; ++i) {
      metrics.factor_ranks[static_cast<std::size_t>(i)] = 0;
      metrics.factor_support[static_cast<std::size_t>(i)] = 0;
    }
    return {rep, metrics};
  }

  // Budget split per eq:1: each factor moves by < eps1' in Frobenius norm,
  // so each Gram entry moves by < 2 eps1' sqrt(L) + eps1'^2 = eps_budget.
  const double eps1p = epsilon1(inst.big_l, 2.0 * eps_budget);
  metrics.eps1 = eps1p;
  metrics.rank_cap =
      inst.ell > 0.0
          ? checked_ceil(inst.ell * inst.ell / (eps1p * eps1p), "stage1.cap")
          : 0;

  std::int64_t chain_cap = checked_ceil(
      18.0 * inst.big_l * inst.ell * inst.ell / (4.0 * eps_budget * eps_budget),
      "stage1.chain");
  if (metrics.rank_cap > chain_cap) {
    std::ostringstream warn;
    warn << "stage1: ceil(ell^2/eps1^2) = " << metrics.rank_cap
         << " exceeds the ceiling-chain cap " << chain_cap
         << " (budget outside the x <= 1/4 regime); rank bound enforced on "
            "the achieved side instead";
    metrics.warnings.push_back(warn.str());
  }

  Rng root(params.seed);
  GramRep rep;
  rep.factors.resize(static_cast<std::size_t>(n));
  std::vector<CarathResult> results(static_cast<std::size_t>(n));
  parallel_for(n, params.threads, [&](std::int64_t i) {
    const Matrix& factor = inst.witness.factors[static_cast<std::size_t>(i)];
    std::uint64_t seed =
        root.split(kStage1Stream + static_cast<std::uint64_t>(i)).root_seed();
    results[static_cast<std::size_t>(i)] =
        low_rank_psd_approx(factor, eps1p, params.strategy,
                            params.carath_retry_budget, seed);
  });

  for (Index i = 0; i < n; ++i) {
    auto& res = results[static_cast<std::size_t>(i)];
    const Matrix& factor = inst.witness.factors[static_cast<std::size_t>(i)];
    double tr_in = factor.trace();
    double tr_out = res.approx.trace();
    if (std::abs(tr_in - tr_out) > Tol::trace_rel * std::max(1.0, tr_in)) {
      throw DiagnosticError("stage1: factor trace not preserved");
    }
    std::int64_t factor_cap = carath_bound(tr_in, eps1p);
    if (res.support_size > factor_cap) {
      throw DiagnosticError("stage1: atom budget exceeded");
    }
    metrics.factor_support[static_cast<std::size_t>(i)] = res.support_size;
    metrics.factor_ranks[static_cast<std::size_t>(i)] =
        numerical_rank(res.approx);
    metrics.retries += res.retries;
    rep.factors[static_cast<std::size_t>(i)] = std::move(res.approx);
  }

  metrics.max_entry_error = max_entry_dev(inst.target, gram(rep));
  if (metrics.max_entry_error > eps_budget) {
    std::ostringstream msg;
    msg << "stage1: measured entrywise error " << metrics.max_entry_error
        << " exceeds the stage budget " << eps_budget;
    throw DiagnosticError(msg.str());
  }
  return {std::move(rep), metrics};
}

std::pair<GramRep, Stage2Metrics> stage2(const GramRep& rep1,
                                         const CpsdInstance& inst,
                                         double eps_budget,
                                         const ApproxParams& params) {
  if (eps_budget <= 0.0) {
    throw std::invalid_argument("stage2: eps budget must be > 0");
  }
  const Index n = rep1.size();
  const Index d = rep1.side();
  Stage2Metrics metrics;
  metrics.budget = eps_budget;

  // Eigendecompose every stage-1 factor; the unit eigenvectors with
  // above-cutoff eigenvalues form the point set handed to the projection.
  std::vector<EigenDecomp> decomps(static_cast<std::size_t>(n));
  parallel_for(n, params.threads, [&](std::int64_t i) {
    decomps[static_cast<std::size_t>(i)] =
        sym_eig(rep1.factors[static_cast<std::size_t>(i)]);
  });

  std::vector<std::vector<Index>> kept(static_cast<std::size_t>(n));
  Index total_points = 0;
  for (Index i = 0; i < n; ++i) {
    const auto& ed = decomps[static_cast<std::size_t>(i)];
    double lambda_max =
        ed.values.size() ? ed.values.cwiseAbs().maxCoeff() : 0.0;
    double cutoff = Tol::rank * std::max(1.0, lambda_max);
    for (Index k = 0; k < ed.values.size(); ++k) {
      if (ed.values(k) > cutoff) {
        kept[static_cast<std::size_t>(i)].push_back(k);
        ++total_points;
      }
    }
  }
  metrics.point_count = total_points;

  if (total_points == 0) {
    // All factors vanish; the canonical zero representation of side 1.
    GramRep rep;
    for (Index i = 0; i < n; ++i) rep.factors.emplace_back(Matrix::Zero(1, 1));
    metrics.output_side = 1;
    return {rep, metrics};
  }

  if (inst.ell <= 0.0) {
    throw std::invalid_argument("stage2: ell is 0 but factors are nonzero");
  }
  const double eps2v = epsilon2(inst.ell, 2.0 * eps_budget);
  metrics.eps2 = eps2v;

  Matrix columns(d, total_points);
  Index col = 0;
  for (Index i = 0; i < n; ++i) {
    const auto& ed = decomps[static_cast<std::size_t>(i)];
    for (Index k : kept[static_cast<std::size_t>(i)]) {
      columns.col(col++) = ed.vectors.col(k);
    }
  }
  PointSet points = PointSet::from_columns(std::move(columns));

  std::uint64_t jl_seed = Rng(params.seed).split(kJlStream).root_seed();
  JlResult projected = jl_project(points, eps2v, params.jl_retry_budget,
                                  jl_seed, params.threads);
  metrics.target_dim = projected.target_dim;
  metrics.retries = projected.retries;
  metrics.identity_projection = projected.identity;

  GramRep rep;
  if (projected.identity) {
    rep = rep1;  // unchanged; zero distortion
    metrics.output_side = d;
    metrics.max_entry_error = 0.0;
    return {std::move(rep), metrics};
  }

  const Index r = projected.output_dim();
  rep.factors.resize(static_cast<std::size_t>(n));
  col = 0;
  for (Index i = 0; i < n; ++i) {
    const auto& ed = decomps[static_cast<std::size_t>(i)];
    const auto& keep = kept[static_cast<std::size_t>(i)];
    if (keep.empty()) {
      rep.factors[static_cast<std::size_t>(i)] = Matrix::Zero(r, r);
      continue;
    }
    Matrix vecs(r, static_cast<Index>(keep.size()));
    Vector weights(static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      vecs.col(static_cast<Index>(k)) = projected.projected.col(col++);
      weights(static_cast<Index>(k)) = ed.values(keep[k]);
    }
    Matrix rebuilt = vecs * weights.asDiagonal() * vecs.transpose();
    rep.factors[static_cast<std::size_t>(i)] =
        0.5 * (rebuilt + rebuilt.transpose());
  }
  metrics.output_side = r;

  metrics.max_entry_error = max_entry_dev(gram(rep1), gram(rep));
  if (metrics.max_entry_error > eps_budget) {
    std::ostringstream msg;
    msg << "stage2: measured entrywise error " << metrics.max_entry_error
        << " exceeds the stage budget " << eps_budget;
    throw DiagnosticError(msg.str());
  }
  return {std::move(rep), metrics};
}

namespace {

void require_theorem_range(const CpsdInstance& inst, double eps) {
  double limit = 0.5 * std::min(inst.ell * inst.ell, inst.big_l);
  if (eps > 0.0 && eps < limit) return;
  std::ostringstream msg;
  msg << "approximate: eps = " << eps << " outside the admissible range (0, "
      << limit << ") = (0, min(ell^2, L)/2) for ell = " << inst.ell
      << ", L = " << inst.big_l;
  // Projection witnesses (ell = L) are sometimes quoted with the looser
  // range (0, L^2/2); the stricter general hypothesis is what is enforced.
  double ell_l_gap = std::abs(inst.ell - inst.big_l);
  if (ell_l_gap <= 1e-9 * std::max(1.0, inst.big_l) &&
      eps < 0.5 * inst.big_l * inst.big_l) {
    msg << "; note: eps does satisfy the looser projection-instance range "
           "(0, L^2/2), which is not sufficient here";
  }
  throw std::domain_error(msg.str());
}

ApproxReport finish_report(const CpsdInstance& inst, const ApproxParams& params,
                           GramRep final_rep, Mode mode_used,
                           Stage1Metrics m1, std::optional<Stage2Metrics> m2,
                           RankBounds bounds, bool cp) {
  ApproxReport rep;
  rep.output_rep = std::move(final_rep);
  rep.output = gram(rep.output_rep);
  rep.achieved_error = max_entry_dev(inst.target, rep.output);
  rep.rep_side = rep.output_rep.side();
  rep.bound_first = bounds.first;
  rep.bound_second = bounds.second;
  rep.eps = params.eps;
  rep.mode_requested = params.mode;
  rep.mode_used = mode_used;
  rep.cp = cp;
  rep.seed = params.seed;
  rep.n = inst.size();
  rep.ell = inst.ell;
  rep.big_l = inst.big_l;
  rep.warnings = m1.warnings;
  rep.stage1 = std::move(m1);
  rep.stage2 = std::move(m2);

  if (!(rep.achieved_error < params.eps)) {
    std::ostringstream msg;
    msg << "approximate: achieved entrywise error " << rep.achieved_error
        << " is not below eps = " << params.eps;
    throw DiagnosticError(msg.str());
  }
  return rep;
}

}  // namespace

ApproxReport approximate(const CpsdInstance& inst, const ApproxParams& params) {
  require_theorem_range(inst, params.eps);
  const std::int64_t n = inst.size();
  RankBounds bounds = rank_bounds(n, inst.ell, inst.big_l, params.eps);

  Mode mode = params.mode;
  if (mode == Mode::auto_select) {
    mode = bounds.first <= bounds.second ? Mode::stage1_only
                                         : Mode::stage2_full;
  }

  if (mode == Mode::stage1_only) {
    auto [rep1, m1] = stage1(inst, params.eps, params);
    GramRep compressed = compress_rep(rep1);
    ApproxReport rep = finish_report(inst, params, std::move(compressed), mode,
                                     std::move(m1), std::nullopt, bounds,
                                     /*cp=*/false);
    if (rep.rep_side > bounds.first) {
      throw DiagnosticError("approximate: compressed side exceeds bound_first");
    }
    return rep;
  }

  auto [rep1, m1] = stage1(inst, params.eps / 2.0, params);
  auto [rep2, m2] = stage2(rep1, inst, params.eps / 2.0, params);
  if (m2.point_count > 0 && m2.target_dim > bounds.second) {
    throw DiagnosticError(
        "approximate: JL target dimension exceeds bound_second");
  }
  ApproxReport rep = finish_report(inst, params, std::move(rep2), mode,
                                   std::move(m1), std::move(m2), bounds,
                                   /*cp=*/false);
  if (rep.rep_side > bounds.second) {
    throw DiagnosticError("approximate: output side exceeds bound_second");
  }
  return rep;
}

namespace {

bool matrix_is_diagonal(const Matrix& a) {
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  Matrix off = a;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

}  // namespace

ApproxReport approximate_cp(const CpsdInstance& inst,
                            const ApproxParams& params) {
  if (params.eps <= 0.0) {
    throw std::domain_error("approximate_cp: eps must be > 0");
  }
  for (const Matrix& f : inst.witness.factors) {
    if (!matrix_is_diagonal(f)) {
      throw std::invalid_argument("approximate_cp: witness not diagonal");
    }
  }

  const std::int64_t n = inst.size();
  RankBounds bounds;
  if (inst.ell > 0.0 && inst.big_l > 0.0) {
    bounds = rank_bounds(n, inst.ell, inst.big_l, params.eps);
  }

  auto [rep1, m1] = stage1(inst, params.eps, params);
  GramRep compressed = compress_rep(rep1);
  for (const Matrix& f : compressed.factors) {
    if (!matrix_is_diagonal(f)) {
      throw DiagnosticError("approximate_cp: output factor not diagonal");
    }
  }
  ApproxReport rep = finish_report(inst, params, std::move(compressed),
                                   Mode::stage1_only, std::move(m1),
                                   std::nullopt, bounds, /*cp=*/true);
  if (bounds.first > 0 && rep.rep_side > bounds.first) {
    throw DiagnosticError("approximate_cp: side exceeds the cp-rank bound");
  }
  return rep;
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::stage1_only: return "stage1";
    case Mode::stage2_full: return "stage2";
    case Mode::auto_select: return "auto";
  }
  return "auto";
}

Mode mode_from_name(const std::string& name) {
  if (name == "stage1" || name == "stage1_only") return Mode::stage1_only;
  if (name == "stage2" || name == "stage2_full") return Mode::stage2_full;
  if (name == "auto") return Mode::auto_select;
  throw std::invalid_argument("unknown mode: " + name);
}

}  // namespace cpsd
