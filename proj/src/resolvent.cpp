#include "qrmt/resolvent.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

namespace qrmt {

namespace {

Eigen::MatrixXcd shifted(const Eigen::MatrixXcd& w, std::complex<double> z) {
  Eigen::MatrixXcd m = w;
  m.diagonal().array() -= z;
  return m;
}

Eigen::MatrixXcd invert_or_throw(const Eigen::MatrixXcd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite()) throw SingularSystem("resolvent system is singular");
  return inv;
}

// Eigen's estimator reports rcond = 1 when a pivot is exactly zero, so check pivots first.
double reciprocal_condition(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  if (lu.matrixLU().size() == 0) return 1.0;
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) return 0.0;
  return lu.rcond();
}

}  // namespace

Resolvent resolvent(const Eigen::MatrixXcd& w, const ComplexPoint& z) {
  if (w.rows() != w.cols()) throw OddDimension("resolvent needs a square matrix");
  Resolvent r;
  r.z = z;
  if (w.rows() == 0) return r;
  const Eigen::MatrixXcd m = shifted(w, z.z());
  r.D = invert_or_throw(m);
  r.residual = (m * r.D - Eigen::MatrixXcd::Identity(w.rows(), w.cols())).cwiseAbs().maxCoeff();
  return r;
}

Eigen::MatrixXcd quaternion_minor(const Eigen::MatrixXcd& w, int k) {
  const Eigen::Index dim = w.rows();
  const Eigen::Index cut = 2 * static_cast<Eigen::Index>(k);
  const Eigen::Index tail = dim - cut - 2;
  Eigen::MatrixXcd out(dim - 2, dim - 2);
  out.topLeftCorner(cut, cut) = w.topLeftCorner(cut, cut);
  out.topRightCorner(cut, tail) = w.topRightCorner(cut, tail);
  out.bottomLeftCorner(tail, cut) = w.bottomLeftCorner(tail, cut);
  out.bottomRightCorner(tail, tail) = w.bottomRightCorner(tail, tail);
  return out;
}

MinorContext minor_resolvent(const Eigen::MatrixXcd& w, int k, const ComplexPoint& z) {
  const int n = static_cast<int>(w.rows() / 2);
  if (w.rows() != w.cols() || w.rows() % 2 != 0) throw OddDimension("expansion must be 2n x 2n");
  if (k < 0 || k >= n) {
    throw IndexOutOfRange("quaternion index " + std::to_string(k) + " outside [0, " + std::to_string(n) + ")");
  }
  MinorContext ctx;
  ctx.k = k;
  ctx.z = z;
  const Eigen::Index cut = 2 * static_cast<Eigen::Index>(k);
  const Eigen::Index tail = w.rows() - cut - 2;

  ctx.q.resize(w.rows() - 2, 2);
  ctx.q.topRows(cut) = w.block(0, cut, cut, 2);
  ctx.q.bottomRows(tail) = w.block(cut + 2, cut, tail, 2);

  const Eigen::MatrixXcd minor = quaternion_minor(w, k);
  if (minor.rows() > 0) {
    ctx.D_k = invert_or_throw(shifted(minor, z.z()));
  } else {
    ctx.D_k.resize(0, 0);
  }
  ctx.P_k = ctx.D_k * ctx.D_k;
  ctx.trace_D_k = ctx.D_k.trace();
  ctx.trace_D = invert_or_throw(shifted(w, z.z())).trace();
  return ctx;
}

EpsilonK epsilon_k(const MinorContext& ctx, const Quaterniond& x_kk, std::complex<double> Esn, int n) {
  EpsilonK e;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::Matrix2cd quad = Eigen::Matrix2cd::Zero();
  if (ctx.q.rows() > 0) quad = ctx.q.adjoint() * ctx.D_k * ctx.q;
  e.value = scale * quat_to_block(x_kk) - quad + Esn * Eigen::Matrix2cd::Identity();
  const std::complex<double> shift = ctx.z.z() + Esn;
  e.t_n = 1.0 / shift;
  e.xi = (shift * Eigen::Matrix2cd::Identity() - e.value).inverse();
  e.scalar_deviation =
      std::max({std::abs(e.value(0, 1)), std::abs(e.value(1, 0)), std::abs(e.value(0, 0) - e.value(1, 1))});
  return e;
}

std::complex<double> delta_summand(const EpsilonK& eps) { return eps.t_n * (eps.value * eps.xi).trace(); }

std::complex<double> delta_from_minors(const Eigen::MatrixXcd& w, const ComplexPoint& z,
                                       std::complex<double> Esn) {
  const int n = static_cast<int>(w.rows() / 2);
  std::complex<double> total{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const MinorContext ctx = minor_resolvent(w, k, z);
    // n^{-1/2} x_kk is the diagonal block of W itself; pass it with n = 1 so no rescaling applies.
    const Quaterniond diag = Quaterniond::scalar(w(2 * k, 2 * k).real());
    total += delta_summand(epsilon_k(ctx, diag, Esn, 1));
  }
  return total / (2.0 * n);
}

std::complex<double> delta_from_resolvent(const Eigen::MatrixXcd& w, const ComplexPoint& z,
                                          std::complex<double> Esn) {
  const int n = static_cast<int>(w.rows() / 2);
  const Resolvent r = resolvent(w, z);
  const std::complex<double> shift = z.z() + Esn;
  std::complex<double> total{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix2cd block = r.D.block<2, 2>(2 * k, 2 * k);
    const Eigen::Matrix2cd xi = -block;
    const Eigen::Matrix2cd eps = shift * Eigen::Matrix2cd::Identity() + block.inverse();
    total += (eps * xi).trace() / shift;
  }
  return total / (2.0 * n);
}

double imaginary_part_margin(const MinorContext& ctx) {
  std::complex<double> quad{0.0, 0.0};
  if (ctx.q.rows() > 0) {
    const Eigen::VectorXcd varpi = ctx.q.col(0);
    quad = varpi.dot(ctx.D_k * varpi);  // dot conjugates its first argument
  }
  return (-ctx.z.z() - quad).imag() + ctx.z.v;
}

InverseStructureReport verify_inverse_type1(const Eigen::MatrixXcd& m, double tol) {
  if (!is_type2(m, tol)) {
    throw StructureViolation("input is not a Type-II matrix (residual " + std::to_string(type2_residual(m)) + ")");
  }
  InverseStructureReport report;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rcond = reciprocal_condition(lu);
  report.condition_estimate = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(report.condition_estimate <= kSingularCondition)) {
    throw NumericallySingular("condition estimate " + std::to_string(report.condition_estimate) + " exceeds 1e12");
  }
  report.inverse = lu.inverse();
  report.structural_residual = type1_residual(report.inverse);
  report.is_type1 = is_type1(report.inverse, tol);
  return report;
}

Eigen::MatrixXcd BlockInverse::assemble() const {
  const Eigen::Index p = top_left.rows(), q = bottom_right.rows();
  Eigen::MatrixXcd out(p + q, p + q);
  out.topLeftCorner(p, p) = top_left;
  out.topRightCorner(p, q) = top_right;
  out.bottomLeftCorner(q, p) = bottom_left;
  out.bottomRightCorner(q, q) = bottom_right;
  return out;
}

BlockInverse block_inverse(const Eigen::MatrixXcd& m, Eigen::Index split) {
  if (m.rows() != m.cols()) throw InvalidParams("block inverse needs a square matrix");
  if (split <= 0 || split >= m.rows()) throw IndexOutOfRange("split must leave two non-empty blocks");
  const Eigen::Index q = m.rows() - split;
  const auto m11 = m.topLeftCorner(split, split);
  const auto m12 = m.topRightCorner(split, q);
  const auto m21 = m.bottomLeftCorner(q, split);
  const auto m22 = m.bottomRightCorner(q, q);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu11(m11);
  if (!(reciprocal_condition(lu11) * kSingularCondition >= 1.0)) throw SingularBlock("leading block is numerically singular");
  const Eigen::MatrixXcd inv11 = lu11.inverse();
  const Eigen::MatrixXcd schur = m22 - m21 * inv11 * m12;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lus(schur);
  if (!(reciprocal_condition(lus) * kSingularCondition >= 1.0)) throw SingularBlock("Schur complement is numerically singular");
  const Eigen::MatrixXcd inv_schur = lus.inverse();

  BlockInverse b;
  const Eigen::MatrixXcd left = inv11 * m12;   // M11^{-1} M12
  const Eigen::MatrixXcd right = m21 * inv11;  // M21 M11^{-1}
  b.top_left = inv11 + left * inv_schur * right;
  b.top_right = -left * inv_schur;
  b.bottom_left = -inv_schur * right;
  b.bottom_right = inv_schur;
  return b;
}

}  // namespace qrmt
