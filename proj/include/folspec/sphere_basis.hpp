#pragma once

#include "folspec/basis.hpp"

namespace folspec {

/// Tensor quadrature grid on a round sphere: Gauss-Legendre in cos(theta),
/// equispaced in azimuth.  Node index = i_polar * n_azimuth + j_azimuth.
/// Quadrature weights include the radius^2 area factor, so they integrate
/// against the round metric of the given radius.
struct SphereGrid {
  int lmax = 0;
  double radius = 1.0;
  Eigen::Index n_polar = 0, n_azimuth = 0;
  Vec x;          // cos(theta) at polar nodes
  Vec sin_theta;  // sin(theta), strictly positive at interior nodes
  Vec phi;        // azimuth nodes
  Quadrature quad;

  Eigen::Index nodes() const { return n_polar * n_azimuth; }
};

SphereGrid make_sphere_grid(int lmax, double radius);

/// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, Vec& nodes, Vec& weights);

/// Real spherical harmonics, enumerated degree-major: for each l the zonal
/// harmonic first, then cos and sin pairs for m = 1..l.  All orthonormal on
/// the unit sphere.
Eigen::Index harmonic_count(int lmax);
Eigen::Index harmonic_index(int l, int m, bool sine);

/// Node-value tables on a grid, one column per harmonic with degree <= lmax.
struct HarmonicTables {
  Mat values;
  Mat theta_deriv;
  Mat phi_deriv_over_sin;  // (dY/dphi) / sin(theta)
};
HarmonicTables harmonic_tables(const SphereGrid& grid);

/// Graded sector bases of the sphere complex, orthonormal for the round
/// metric: functions Y/r, one-forms split into the gradient family and its
/// rotation by the transverse star, dual functions in top degree.
struct SphereSectors {
  SectorBasis scalar, oneform, twoform;
};
SphereSectors sphere_sectors(const SphereGrid& grid, const HarmonicTables& tables);

}  // namespace folspec
