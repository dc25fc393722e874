#include "cpsd/gram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpsd/errors.hpp"

namespace cpsd {

void GramRep::validate(double psd_tol) const {
  if (factors.empty()) {
    throw std::invalid_argument("GramRep: empty factor list");
  }
  const Index d = factors.front().rows();
  if (d < 1) {
    throw std::invalid_argument("GramRep: factor side must be >= 1");
  }
  for (const Matrix& f : factors) {
    if (f.rows() != d || f.cols() != d) {
      throw std::invalid_argument("GramRep: factors have differing sides");
    }
    require_symmetric(f);
    if (!is_psd(f, psd_tol)) {
      throw std::invalid_argument("GramRep: factor is not psd");
    }
  }
}

Index rep_side(const GramRep& rep) { return rep.side(); }

Index gram_rank_of_rep(const GramRep& rep, double tol) {
  Index r = 0;
  for (const Matrix& f : rep.factors) {
    r = std::max(r, numerical_rank(f, tol));
  }
  return r;
}

Matrix gram(const GramRep& rep) {
  const Index n = rep.size();
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      double v = trace_inner(rep.factors[static_cast<std::size_t>(i)],
                             rep.factors[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

GramRep compress_rep(const GramRep& rep, double tol) {
  const Index n = rep.size();
  const Index d = rep.side();
  if (n == 0) throw std::invalid_argument("compress_rep: empty rep");

  Matrix total = Matrix::Zero(d, d);
  for (const Matrix& f : rep.factors) total += f;

  EigenDecomp ed = sym_eig(total);
  double lambda_max = ed.values.size() ? ed.values.cwiseAbs().maxCoeff() : 0.0;
  double cutoff = tol * std::max(1.0, lambda_max);
  Index r = 0;
  for (Index k = 0; k < ed.values.size(); ++k) {
    if (std::abs(ed.values(k)) > cutoff) ++r;
  }

  GramRep out;
  out.factors.reserve(static_cast<std::size_t>(n));
  if (r == 0) {
    // All factors vanish; side-1 zero factors by convention.
    for (Index i = 0; i < n; ++i) out.factors.emplace_back(Matrix::Zero(1, 1));
    return out;
  }

  const Matrix& basis = ed.vectors;  // columns sorted by eigenvalue, desc
  for (Index i = 0; i < n; ++i) {
    const Matrix& f = rep.factors[static_cast<std::size_t>(i)];
    Matrix rotated = basis.transpose() * f * basis;
    Matrix kept = rotated.topLeftCorner(r, r);
    double discarded =
        std::sqrt(std::max(0.0, rotated.squaredNorm() - kept.squaredNorm()));
    if (discarded > Tol::residual_mass * f.norm()) {
      std::ostringstream msg;
      msg << "compress_rep: factor " << i << " keeps " << discarded
          << " Frobenius mass outside the rank-" << r
          << " block (limit " << Tol::residual_mass * f.norm() << ")";
      throw DiagnosticError(msg.str());
    }
    kept = 0.5 * (kept + kept.transpose());
    out.factors.push_back(std::move(kept));
  }
  return out;
}

namespace {

void check_witness_consistency(const Matrix& target, const GramRep& witness) {
  Matrix g = gram(witness);
  if (g.rows() != target.rows()) {
    throw std::invalid_argument(
        "instance: witness length differs from target side");
  }
  double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
  double dev = (g - target).cwiseAbs().maxCoeff();
  if (dev > Tol::gram * scale) {
    std::ostringstream msg;
    msg << "instance: gram(witness) deviates from target by " << dev
        << " (limit " << Tol::gram * scale << ")";
    throw std::invalid_argument(msg.str());
  }
  if (target.minCoeff() < -Tol::gram * scale) {
    throw std::invalid_argument(
        "instance: target has negative entries (not doubly nonnegative)");
  }
}

}  // namespace

CpsdInstance make_instance(Matrix target, GramRep witness) {
  require_symmetric(target);
  witness.validate();
  check_witness_consistency(target, witness);
  CpsdInstance inst;
  inst.ell = 0.0;
  for (const Matrix& f : witness.factors) {
    inst.ell = std::max(inst.ell, f.trace());
  }
  inst.big_l = target.diagonal().maxCoeff();
  inst.target = std::move(target);
  inst.witness = std::move(witness);
  return inst;
}

CpsdInstance instance_scale(const CpsdInstance& inst, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("instance_scale: lambda must be >= 0");
  }
  double root = std::sqrt(lambda);
  GramRep scaled;
  scaled.factors.reserve(inst.witness.factors.size());
  for (const Matrix& f : inst.witness.factors) {
    scaled.factors.push_back(root * f);
  }
  CpsdInstance out = make_instance(lambda * inst.target, std::move(scaled));
  out.meta_family = inst.meta_family;
  out.meta_seed = inst.meta_seed;
  out.meta_params = inst.meta_params;
  return out;
}

CpsdInstance instance_add(const CpsdInstance& a, const CpsdInstance& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("instance_add: size mismatch");
  }
  GramRep summed;
  summed.factors.reserve(a.witness.factors.size());
  for (std::size_t i = 0; i < a.witness.factors.size(); ++i) {
    summed.factors.push_back(
        block_diag_sum(a.witness.factors[i], b.witness.factors[i]));
  }
  return make_instance(a.target + b.target, std::move(summed));
}

}  // namespace cpsd
