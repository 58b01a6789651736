#pragma once

#include <string>
#include <vector>

#include "folspec/types.hpp"

namespace folspec {

/// Quadrature rule on the base manifold of a reduced complex.  Weights carry
/// the unweighted Riemannian measure; complexes multiply in their own weight
/// function on top.
struct Quadrature {
  Vec weights;
  Eigen::Index nodes() const { return weights.size(); }
};

/// Node-value tables for one graded sector.  Columns are basis elements,
/// rows are quadrature nodes stacked component-major: row c*nodes + j holds
/// the c-th orthonormal-frame component at node j.  Scalars have one
/// component, transverse k-forms have binom(q, k).
struct SectorBasis {
  int components = 1;
  Eigen::Index dim = 0;
  Mat values;  // (components * nodes) x dim
  /// Column layout: consecutive families (generators of the sector, or the
  /// gradient/curl families on the sphere).  Needed to embed a coarse basis
  /// into a finer one of the same model.
  std::vector<Eigen::Index> family_dims;
  std::vector<std::string> family_labels;

  Eigen::Index family_offset(std::size_t f) const {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < f; ++i) n += family_dims[i];
    return n;
  }
};

/// Real trigonometric orthonormal basis on a circle of circumference ell:
/// index 0 is the constant, indices 2m-1 / 2m are sqrt(2/ell)*cos / sin of
/// the m-th mode.  Differentiation is exact in this basis.
struct CircleBasis {
  double ell = 1.0;
  int modes = 0;

  Eigen::Index dim() const { return 2 * Eigen::Index(modes) + 1; }
  /// d/dt as a matrix on coefficients.
  Mat diff() const;
  /// Basis values at the given points.
  Mat values_at(const Vec& t) const;
  /// Equispaced collocation nodes, count = factor * dim().
  Vec collocation_nodes(int factor = 3) const;
  Quadrature quadrature(int factor = 3) const;

  /// Coefficients of a plain trig series [a0, a1c, a1s, ...] re-expressed in
  /// this orthonormal basis (zero-padded or rejected if it does not fit).
  Vec from_plain_coeffs(const std::vector<double>& plain) const;
};

/// Tensor-product trigonometric basis on a flat torus.  Column index is
/// a * by.dim() + b for x-basis index a and y-basis index b.
struct TorusBasis {
  CircleBasis bx, by;

  Eigen::Index dim() const { return bx.dim() * by.dim(); }
  Mat diff_x() const;
  Mat diff_y() const;
  /// Values on the tensor collocation grid; node index j = jx * ny + jy.
  Mat values_on_grid(int factor = 3) const;
  Quadrature quadrature(int factor = 3) const;
};

/// Weighted least-squares projection of node data onto a sector basis: the
/// Galerkin projection for the weighted inner product.  `node_values` has the
/// same row layout as `sector.values` and one column per input vector.
struct ProjectionResult {
  Mat coeffs;
  /// Largest relative weighted-L2 norm dropped over the input columns.
  double tail = 0.0;
};

ProjectionResult project_onto(const SectorBasis& sector, const Quadrature& quad,
                              const Vec& weight_values, const Mat& node_values);

/// Weighted Gram matrix of a sector basis.
Mat sector_gram(const SectorBasis& sector, const Quadrature& quad,
                const Vec& weight_values);

}  // namespace folspec
