#include "folspec/sphere_basis.hpp"

#include <cmath>

namespace folspec {

void gauss_legendre(int n, Vec& nodes, Vec& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence up to degree n at the current iterate.
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    nodes(k) = x;
    weights(k) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

SphereGrid make_sphere_grid(int lmax, double radius) {
  if (lmax < 1) fail(ErrorKind::ModelDefinition, "sphere truncation must be >= 1");
  if (!(radius > 0.0)) fail(ErrorKind::ModelDefinition, "sphere radius must be positive");
  SphereGrid g;
  g.lmax = lmax;
  g.radius = radius;
  g.n_polar = 3 * (lmax + 2);
  g.n_azimuth = 6 * (lmax + 2);
  Vec wp;
  gauss_legendre(int(g.n_polar), g.x, wp);
  g.sin_theta = (1.0 - g.x.array().square()).sqrt();
  g.phi.resize(g.n_azimuth);
  for (Eigen::Index j = 0; j < g.n_azimuth; ++j)
    g.phi(j) = 2.0 * pi * double(j) / double(g.n_azimuth);
  g.quad.weights.resize(g.nodes());
  const double az = 2.0 * pi / double(g.n_azimuth) * radius * radius;
  for (Eigen::Index i = 0; i < g.n_polar; ++i)
    g.quad.weights.segment(i * g.n_azimuth, g.n_azimuth).setConstant(wp(i) * az);
  return g;
}

Eigen::Index harmonic_count(int lmax) {
  return Eigen::Index(lmax + 1) * Eigen::Index(lmax + 1);
}

Eigen::Index harmonic_index(int l, int m, bool sine) {
  if (m == 0) return Eigen::Index(l) * l;
  return Eigen::Index(l) * l + 2 * m - (sine ? 0 : 1);
}

namespace {

// Normalized associated Legendre values and theta-derivatives at one polar
// node, packed as [l][m] with pack(l, m) = l(l+1)/2 + m.  Normalization makes
// the square integrate to one against sin(theta) d(theta).
void legendre_tables(int lmax, double x, double s, Vec& theta, Vec& dtheta) {
  const auto pk = [](int l, int m) { return l * (l + 1) / 2 + m; };
  theta.setZero((lmax + 1) * (lmax + 2) / 2);
  dtheta.setZero(theta.size());
  theta(pk(0, 0)) = std::sqrt(0.5);
  for (int m = 1; m <= lmax; ++m)
    theta(pk(m, m)) =
        std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * theta(pk(m - 1, m - 1));
  for (int m = 0; m < lmax; ++m)
    theta(pk(m + 1, m)) = std::sqrt(2.0 * m + 3.0) * x * theta(pk(m, m));
  for (int m = 0; m <= lmax; ++m)
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * double(l - 1) * (l - 1) - 1.0));
      theta(pk(l, m)) = a * (x * theta(pk(l - 1, m)) - b * theta(pk(l - 2, m)));
    }
  for (int m = 0; m <= lmax; ++m)
    for (int l = m; l <= lmax; ++l) {
      double v = l * x * theta(pk(l, m));
      if (l > m)
        v -= std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) *
                       (double(l) * l - double(m) * m)) *
             theta(pk(l - 1, m));
      dtheta(pk(l, m)) = v / s;
    }
}

}  // namespace

HarmonicTables harmonic_tables(const SphereGrid& grid) {
  const int L = grid.lmax;
  const auto pk = [](int l, int m) { return l * (l + 1) / 2 + m; };
  const Eigen::Index cols = harmonic_count(L);
  HarmonicTables t;
  t.values.setZero(grid.nodes(), cols);
  t.theta_deriv.setZero(grid.nodes(), cols);
  t.phi_deriv_over_sin.setZero(grid.nodes(), cols);

  const double z0 = 1.0 / std::sqrt(2.0 * pi);
  const double z1 = 1.0 / std::sqrt(pi);
  Vec th, dth;
  for (Eigen::Index i = 0; i < grid.n_polar; ++i) {
    legendre_tables(L, grid.x(i), grid.sin_theta(i), th, dth);
    for (Eigen::Index j = 0; j < grid.n_azimuth; ++j) {
      const Eigen::Index row = i * grid.n_azimuth + j;
      for (int l = 0; l <= L; ++l) {
        t.values(row, harmonic_index(l, 0, false)) = th(pk(l, 0)) * z0;
        t.theta_deriv(row, harmonic_index(l, 0, false)) = dth(pk(l, 0)) * z0;
        for (int m = 1; m <= l; ++m) {
          const double c = std::cos(m * grid.phi(j)), sn = std::sin(m * grid.phi(j));
          const Eigen::Index ic = harmonic_index(l, m, false);
          const Eigen::Index is = harmonic_index(l, m, true);
          t.values(row, ic) = th(pk(l, m)) * c * z1;
          t.values(row, is) = th(pk(l, m)) * sn * z1;
          t.theta_deriv(row, ic) = dth(pk(l, m)) * c * z1;
          t.theta_deriv(row, is) = dth(pk(l, m)) * sn * z1;
          const double over = m * th(pk(l, m)) / grid.sin_theta(i) * z1;
          t.phi_deriv_over_sin(row, ic) = -over * sn;
          t.phi_deriv_over_sin(row, is) = over * c;
        }
      }
    }
  }
  return t;
}

SphereSectors sphere_sectors(const SphereGrid& grid, const HarmonicTables& tables) {
  const int L = grid.lmax;
  const double r = grid.radius;
  const Eigen::Index n = grid.nodes();
  const Eigen::Index nsc = harmonic_count(L);
  const Eigen::Index nve = nsc - 1;  // harmonics of degree >= 1

  SphereSectors s;
  s.scalar.components = 1;
  s.scalar.dim = nsc;
  s.scalar.values = tables.values / r;
  s.scalar.family_dims = {nsc};
  s.scalar.family_labels = {"functions"};

  s.twoform = s.scalar;
  s.twoform.family_labels = {"dual-functions"};

  s.oneform.components = 2;
  s.oneform.dim = 2 * nve;
  s.oneform.values.setZero(2 * n, 2 * nve);
  s.oneform.family_dims = {nve, nve};
  s.oneform.family_labels = {"gradient", "rotated"};
  for (int l = 1; l <= L; ++l) {
    const double scale = 1.0 / (r * std::sqrt(double(l) * (l + 1)));
    for (Eigen::Index k = l * l; k < (l + 1) * Eigen::Index(l + 1); ++k) {
      const Eigen::Index col = k - 1;  // drop the constant harmonic
      const Vec c1 = tables.theta_deriv.col(k) * scale;
      const Vec c2 = tables.phi_deriv_over_sin.col(k) * scale;
      s.oneform.values.col(col).head(n) = c1;
      s.oneform.values.col(col).tail(n) = c2;
      s.oneform.values.col(nve + col).head(n) = -c2;
      s.oneform.values.col(nve + col).tail(n) = c1;
    }
  }
  return s;
}

}  // namespace folspec
