#include "cpsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cpsd/errors.hpp"

namespace cpsd {

void require_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  if (a.size() == 0) {
    throw std::invalid_argument("matrix has side 0");
  }
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double skew = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (skew > tol * scale) {
    std::ostringstream msg;
    msg << "matrix is not symmetric: max |a_ij - a_ji| = " << skew;
    throw std::invalid_argument(msg.str());
  }
}

double trace_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace_inner: dimension mismatch");
  }
  return (a.array() * b.array()).sum();
}

double frobenius(const Matrix& a) { return a.norm(); }

namespace {

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  for (Index p = 0; p < a.rows(); ++p) {
    for (Index q = 0; q < a.cols(); ++q) {
      if (p != q) s += a(p, q) * a(p, q);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomp sym_eig(const Matrix& input, double tol, int max_sweeps) {
  require_symmetric(input);
  const Index n = input.rows();
  Matrix a = Matrix::Zero(n, n);
  a = 0.5 * (input + input.transpose());  // exact symmetry for the rotations
  Matrix v = Matrix::Identity(n, n);
  const double full_norm = a.norm();
  const double target = tol * full_norm;

  double off = offdiag_norm(a);
  int sweeps = 0;
  while (off > target && sweeps < max_sweeps) {
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;  // tan of the rotation angle, smaller root
        if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;

        // a <- J^t a J with J the (p,q) Givens rotation; update rows/cols.
        for (Index k = 0; k < n; ++k) {
          double akp = a(k, p);
          double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          double apk = a(p, k);
          double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          double vkp = v(k, p);
          double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweeps;
    off = offdiag_norm(a);
  }
  if (off > target) {
    std::ostringstream msg;
    msg << "sym_eig: Jacobi did not converge in " << max_sweeps
        << " sweeps; off-diagonal residual " << off << " (target " << target
        << ")";
    throw ConvergenceError(msg.str());
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  EigenDecomp out;
  out.values = Vector(n);
  out.vectors = Matrix(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)],
                      order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

bool is_psd(const Matrix& a, double tol) {
  EigenDecomp ed = sym_eig(a);
  if (ed.values.size() == 0) return true;
  double lambda_max = std::abs(ed.values(0));
  double lambda_min = ed.values(ed.values.size() - 1);
  return lambda_min >= -tol * std::max(1.0, lambda_max);
}

Index numerical_rank(const Matrix& a, double tol) {
  EigenDecomp ed = sym_eig(a);
  double lambda_max = ed.values.cwiseAbs().maxCoeff();
  double cutoff = tol * std::max(1.0, lambda_max);
  Index r = 0;
  for (Index k = 0; k < ed.values.size(); ++k) {
    if (std::abs(ed.values(k)) > cutoff) ++r;
  }
  return r;
}

Vector clip_negative_eigenvalues(const Vector& values, double tol) {
  if (values.size() == 0) return values;
  double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  Vector out = values;
  for (Index k = 0; k < out.size(); ++k) {
    if (out(k) < 0.0 && out(k) >= -tol * scale) out(k) = 0.0;
  }
  return out;
}

Matrix block_diag_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix hermitian_embed(const HermMatrix& m, double tol) {
  require_symmetric(m.real_part, tol);
  if (m.imag_part.rows() != m.real_part.rows() ||
      m.imag_part.cols() != m.real_part.cols()) {
    throw std::invalid_argument("hermitian_embed: part sizes differ");
  }
  double scale = std::max(1.0, std::max(m.real_part.cwiseAbs().maxCoeff(),
                                        m.imag_part.cwiseAbs().maxCoeff()));
  double skew = (m.imag_part + m.imag_part.transpose()).cwiseAbs().maxCoeff();
  if (skew > tol * scale) {
    throw std::invalid_argument(
        "hermitian_embed: imaginary part is not antisymmetric");
  }
  const Index d = m.real_part.rows();
  Matrix out(2 * d, 2 * d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  out.topLeftCorner(d, d) = m.real_part;
  out.topRightCorner(d, d) = -m.imag_part;
  out.bottomLeftCorner(d, d) = m.imag_part;
  out.bottomRightCorner(d, d) = m.real_part;
  return inv_sqrt2 * out;
}

}  // namespace cpsd
