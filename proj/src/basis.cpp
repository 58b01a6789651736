#include "folspec/basis.hpp"

#include <cmath>

namespace folspec {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Mat CircleBasis::diff() const {
  Mat d = Mat::Zero(dim(), dim());
  for (int m = 1; m <= modes; ++m) {
    const double w = 2.0 * pi * m / ell;
    // cos_m' = -w sin_m, sin_m' = w cos_m
    d(2 * m, 2 * m - 1) = -w;
    d(2 * m - 1, 2 * m) = w;
  }
  return d;
}

Mat CircleBasis::values_at(const Vec& t) const {
  const double c0 = 1.0 / std::sqrt(ell);
  const double c1 = std::sqrt(2.0 / ell);
  Mat v(t.size(), dim());
  v.col(0).setConstant(c0);
  for (int m = 1; m <= modes; ++m) {
    const double w = 2.0 * pi * m / ell;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      v(j, 2 * m - 1) = c1 * std::cos(w * t(j));
      v(j, 2 * m) = c1 * std::sin(w * t(j));
    }
  }
  return v;
}

Vec CircleBasis::collocation_nodes(int factor) const {
  const Eigen::Index n = factor * dim();
  Vec t(n);
  for (Eigen::Index j = 0; j < n; ++j) t(j) = ell * double(j) / double(n);
  return t;
}

Quadrature CircleBasis::quadrature(int factor) const {
  const Eigen::Index n = factor * dim();
  Quadrature q;
  q.weights = Vec::Constant(n, ell / double(n));
  return q;
}

Vec CircleBasis::from_plain_coeffs(const std::vector<double>& plain) const {
  if (Eigen::Index(plain.size()) > dim())
    fail(ErrorKind::Schema, "coefficient list longer than the truncated basis");
  Vec c = Vec::Zero(dim());
  if (!plain.empty()) c(0) = plain[0] * std::sqrt(ell);
  for (std::size_t i = 1; i < plain.size(); ++i)
    c(Eigen::Index(i)) = plain[i] * std::sqrt(ell / 2.0);
  return c;
}

Mat TorusBasis::diff_x() const {
  return kron(bx.diff(), Mat::Identity(by.dim(), by.dim()));
}

Mat TorusBasis::diff_y() const {
  return kron(Mat::Identity(bx.dim(), bx.dim()), by.diff());
}

Mat TorusBasis::values_on_grid(int factor) const {
  const Vec tx = bx.collocation_nodes(factor);
  const Vec ty = by.collocation_nodes(factor);
  const Mat vx = bx.values_at(tx);
  const Mat vy = by.values_at(ty);
  Mat v(tx.size() * ty.size(), dim());
  for (Eigen::Index a = 0; a < bx.dim(); ++a)
    for (Eigen::Index b = 0; b < by.dim(); ++b) {
      const Eigen::Index col = a * by.dim() + b;
      for (Eigen::Index jx = 0; jx < tx.size(); ++jx)
        v.col(col).segment(jx * ty.size(), ty.size()) = vx(jx, a) * vy.col(b);
    }
  return v;
}

Quadrature TorusBasis::quadrature(int factor) const {
  const Eigen::Index nx = factor * bx.dim(), ny = factor * by.dim();
  Quadrature q;
  q.weights = Vec::Constant(nx * ny, bx.ell * by.ell / double(nx * ny));
  return q;
}

Mat sector_gram(const SectorBasis& sector, const Quadrature& quad,
                const Vec& weight_values) {
  const Eigen::Index n = quad.nodes();
  const Vec w = quad.weights.cwiseProduct(weight_values);
  Mat g = Mat::Zero(sector.dim, sector.dim);
  for (int c = 0; c < sector.components; ++c) {
    const auto vc = sector.values.middleRows(c * n, n);
    g.noalias() += vc.transpose() * w.asDiagonal() * vc;
  }
  return g;
}

ProjectionResult project_onto(const SectorBasis& sector, const Quadrature& quad,
                              const Vec& weight_values, const Mat& node_values) {
  const Eigen::Index n = quad.nodes();
  const Vec w = quad.weights.cwiseProduct(weight_values);
  Mat g = Mat::Zero(sector.dim, sector.dim);
  Mat b = Mat::Zero(sector.dim, node_values.cols());
  for (int c = 0; c < sector.components; ++c) {
    const auto vc = sector.values.middleRows(c * n, n);
    const auto fc = node_values.middleRows(c * n, n);
    g.noalias() += vc.transpose() * w.asDiagonal() * vc;
    b.noalias() += vc.transpose() * w.asDiagonal() * fc;
  }
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "sector Gram matrix is not positive definite");
  ProjectionResult r;
  r.coeffs = llt.solve(b);

  // Weighted-L2 norm of what the truncation cannot represent, per column.
  for (Eigen::Index col = 0; col < node_values.cols(); ++col) {
    double full = 0.0, kept = 0.0;
    for (int c = 0; c < sector.components; ++c) {
      const auto vc = sector.values.middleRows(c * n, n);
      const Vec fc = node_values.col(col).segment(c * n, n);
      const Vec rc = fc - vc * r.coeffs.col(col);
      full += fc.cwiseProduct(fc).dot(w);
      kept += rc.cwiseProduct(rc).dot(w);
    }
    if (full > 0.0) r.tail = std::max(r.tail, std::sqrt(std::max(kept, 0.0) / full));
  }
  return r;
}

}  // namespace folspec
