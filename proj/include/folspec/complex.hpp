#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "folspec/basis.hpp"
#include "folspec/graded_matrix.hpp"
#include "folspec/sphere_basis.hpp"

namespace folspec {

enum class BaseKind { Circle, Torus, Sphere };
enum class ModuleKind { DeRham, Spinor };
enum class ModelKind {
  Carriere,
  CircleFibration,
  TorusBase,
  SphereBase,
  HopfDeRham,
  HopfSpinor,
  Synthetic,
};

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// A basic function given by finitely many coefficients.  Fourier literals
/// are plain trig series a0 + a1c cos(2 pi t / l) + a1s sin(...) + ... on a
/// circle (applied to the first factor on a torus); harmonic literals are
/// coefficients against the orthonormal real spherical harmonics in
/// degree-major order (zonal, then cos/sin pairs).
struct WeightLiteral {
  enum class Family { Fourier, Harmonic };
  Family family = Family::Fourier;
  std::vector<double> coeffs;

  static WeightLiteral parse(const std::string& text);
  std::string text() const;
  bool is_zero() const;
};

/// Curvature constants a model supplies for the eigenvalue estimates.
/// Absent fields disable the estimates that need them.
struct CurvatureData {
  std::optional<double> transversal_scalar;  // of the transverse connection
  std::optional<double> ambient_scalar;
  std::optional<double> leaf_scalar;
  std::optional<double> oneill_a_sq;
  std::optional<double> oneill_t_sq;
  std::optional<double> kappa_sq;
};

struct ModelDescriptor {
  ModelKind kind = ModelKind::Carriere;
  std::string name;  // registry name, or the synthetic model's own name
  int truncation = 0;
  double length = 1.0;    // circle-family base circumference
  double length_y = 1.0;  // second torus factor
  double radius = 0.5;    // sphere-family
  Eigen::Matrix2i monodromy = (Eigen::Matrix2i() << 2, 1, 1, 1).finished();
  /// Exponent of the base fiber volume / weight, when built from a literal.
  std::optional<WeightLiteral> log_weight;
  /// Deformation exponents applied after construction, in order.
  std::vector<WeightLiteral> deformations;
  std::string synthetic_source;  // path of the descriptor file, if any
};

/// Geometry of the transverse base, shared by every complex built over it.
struct BaseGeometry {
  BaseKind kind = BaseKind::Circle;
  CircleBasis circle;
  TorusBasis torus;
  std::shared_ptr<const SphereGrid> sphere;
  std::shared_ptr<const HarmonicTables> sphere_tables;
};

/// Node values of the function a literal names on this base.
Vec literal_values(const BaseGeometry& geom, const WeightLiteral& lit);
/// Orthonormal-frame components of its differential, stacked component-major
/// like SectorBasis rows.
Vec literal_gradient(const BaseGeometry& geom, const WeightLiteral& lit);

/// A finite truncation of the basic-form complex of one model foliation.
/// Sector k holds transverse k-forms in an orthonormal coefficient basis for
/// the unweighted metric; the weight enters through the Gram matrices.  The
/// exterior derivative and transverse star are exact in these bases.
/// Spinor models instead carry a two-sector structural Dirac matrix.
struct ReducedBasicComplex {
  ModelKind kind = ModelKind::Carriere;
  ModuleKind module = ModuleKind::DeRham;
  int codimension = 0;
  int leaf_dimension = 1;
  BaseGeometry geom;
  ModelDescriptor descriptor;
  CurvatureData curvature;

  std::vector<SectorBasis> sectors;  // degree 0..q (de Rham only)
  Quadrature quad;
  Vec weight_values;      // w at nodes, strictly positive
  Vec log_weight_values;  // log w at nodes
  Vec kappa_values;       // frame components of kappa_b at nodes, stacked
  Vec kappa_coeffs;       // kappa_b projected onto sector 1
  double kappa_tail = 0.0;
  double structure_tail = 0.0;  // dropped tail of non-constant structure functions

  std::vector<Mat> d;     // d[k]: sector k -> k+1, exact
  std::vector<Mat> star;  // star[k]: sector k -> q-k, exact
  std::vector<Mat> gram;  // weighted Gram matrix per sector

  std::optional<GradedMatrix> structural_dirac;  // spinor models

  Eigen::Index dim(int degree) const;
  std::vector<Eigen::Index> sector_dims() const;
  Eigen::Index total_dim() const;
  bool is_de_rham() const { return module == ModuleKind::DeRham; }

  /// Construction invariants: shapes, positive weight, SPD Grams within the
  /// condition cap, d*d = 0, closed kappa_b, star sign law.  Throws on
  /// violation; synthetic loading relies on the diagnostics.
  void validate() const;
};

/// Gram matrices for the stored weight, one per sector.
std::vector<Mat> weighted_grams(const ReducedBasicComplex& complex);

}  // namespace folspec
