#include "folspec/models.hpp"

#include <cmath>

#include "folspec/tolerances.hpp"
#include "model_util.hpp"

namespace folspec {

namespace detail {

void require_truncation(int n) {
  if (n < 4) fail(ErrorKind::ModelDefinition, "truncation must be at least 4");
}

SectorBasis generator_sector(const Mat& scalar_values,
                             std::vector<std::string> generators) {
  const Eigen::Index n = scalar_values.rows();
  const Eigen::Index m = scalar_values.cols();
  SectorBasis s;
  s.components = int(generators.size());
  s.dim = Eigen::Index(generators.size()) * m;
  s.values = Mat::Zero(s.components * n, s.dim);
  for (int g = 0; g < s.components; ++g) {
    s.values.block(g * n, g * m, n, m) = scalar_values;
    s.family_dims.push_back(m);
  }
  s.family_labels = std::move(generators);
  return s;
}

Mat rotation_star(Eigen::Index m) {
  Mat s = Mat::Zero(2 * m, 2 * m);
  s.block(0, m, m, m) = -Mat::Identity(m, m);
  s.block(m, 0, m, m) = Mat::Identity(m, m);
  return s;
}

void attach_weight(ReducedBasicComplex& c, const std::optional<WeightLiteral>& phi) {
  const Eigen::Index n = c.quad.nodes();
  if (!phi || phi->is_zero()) {
    c.log_weight_values = Vec::Zero(n);
    c.weight_values = Vec::Ones(n);
    return;
  }
  c.log_weight_values = literal_values(c.geom, *phi);
  c.weight_values = c.log_weight_values.array().exp();
}

void attach_kappa(ReducedBasicComplex& c, const Vec& values) {
  c.kappa_values = values;
  auto pr = project_onto(c.sectors[1], c.quad, c.weight_values, values);
  c.kappa_coeffs = pr.coeffs.col(0);
  c.kappa_tail = pr.tail;
}

void finish(ReducedBasicComplex& c) {
  c.gram = weighted_grams(c);
  c.validate();
}

}  // namespace detail

using namespace detail;

ReducedBasicComplex build_carriere_model(const Eigen::Matrix2i& monodromy,
                                         int truncation) {
  require_truncation(truncation);
  const long det = long(monodromy(0, 0)) * monodromy(1, 1) -
                   long(monodromy(0, 1)) * monodromy(1, 0);
  const long trace = long(monodromy(0, 0)) + monodromy(1, 1);
  if (det != 1 || std::abs(trace) <= 2)
    fail(ErrorKind::ModelDefinition,
         "monodromy must be integral with determinant 1 and |trace| > 2");
  const double t = double(std::abs(trace));
  const double lambda = std::log((t + std::sqrt(t * t - 4.0)) / 2.0);

  ReducedBasicComplex c;
  c.kind = ModelKind::Carriere;
  c.codimension = 2;
  c.leaf_dimension = 1;
  c.geom.kind = BaseKind::Circle;
  c.geom.circle = CircleBasis{1.0, truncation};
  c.quad = c.geom.circle.quadrature(tol::quadrature_factor);
  const Mat base =
      c.geom.circle.values_at(c.geom.circle.collocation_nodes(tol::quadrature_factor));
  const Eigen::Index m = base.cols();
  const Eigen::Index n = base.rows();

  c.sectors.push_back(generator_sector(base, {"1"}));
  c.sectors.push_back(generator_sector(base, {"dt", "sigma"}));
  c.sectors.push_back(generator_sector(base, {"dt^sigma"}));

  const Mat diff = c.geom.circle.diff();
  Mat d0 = Mat::Zero(2 * m, m);
  d0.topRows(m) = diff;
  Mat d1 = Mat::Zero(m, 2 * m);
  d1.rightCols(m) = diff + lambda * Mat::Identity(m, m);
  c.d = {d0, d1};
  c.star = {Mat::Identity(m, m), rotation_star(m), Mat::Identity(m, m)};

  attach_weight(c, std::nullopt);
  Vec kv = Vec::Zero(2 * n);
  kv.head(n).setConstant(lambda);
  attach_kappa(c, kv);

  c.curvature.transversal_scalar = 0.0;
  c.curvature.kappa_sq = lambda * lambda;

  c.descriptor.kind = ModelKind::Carriere;
  c.descriptor.name = model_kind_name(c.kind);
  c.descriptor.truncation = truncation;
  c.descriptor.length = 1.0;
  c.descriptor.monodromy = monodromy;
  finish(c);
  return c;
}

ReducedBasicComplex build_circle_fibration_model(
    double length, const std::optional<WeightLiteral>& log_fiber_volume,
    int truncation) {
  require_truncation(truncation);
  if (!(length > 0.0)) fail(ErrorKind::ModelDefinition, "length must be positive");

  ReducedBasicComplex c;
  c.kind = ModelKind::CircleFibration;
  c.codimension = 1;
  c.leaf_dimension = 1;
  c.geom.kind = BaseKind::Circle;
  c.geom.circle = CircleBasis{length, truncation};
  c.quad = c.geom.circle.quadrature(tol::quadrature_factor);
  const Mat base =
      c.geom.circle.values_at(c.geom.circle.collocation_nodes(tol::quadrature_factor));
  const Eigen::Index m = base.cols();
  const Eigen::Index n = base.rows();

  c.sectors.push_back(generator_sector(base, {"1"}));
  c.sectors.push_back(generator_sector(base, {"dt"}));
  c.d = {c.geom.circle.diff()};
  c.star = {Mat::Identity(m, m), Mat::Identity(m, m)};

  attach_weight(c, log_fiber_volume);
  Vec kv = Vec::Zero(n);
  if (log_fiber_volume && !log_fiber_volume->is_zero())
    kv = -literal_gradient(c.geom, *log_fiber_volume);
  attach_kappa(c, kv);

  c.curvature.transversal_scalar = 0.0;
  if (kv.isZero(0.0)) c.curvature.kappa_sq = 0.0;

  c.descriptor.kind = ModelKind::CircleFibration;
  c.descriptor.name = model_kind_name(c.kind);
  c.descriptor.truncation = truncation;
  c.descriptor.length = length;
  c.descriptor.log_weight = log_fiber_volume;
  finish(c);
  return c;
}

ReducedBasicComplex build_torus_base_model(
    double l1, double l2, const std::optional<WeightLiteral>& log_fiber_volume,
    int truncation) {
  require_truncation(truncation);
  if (!(l1 > 0.0) || !(l2 > 0.0))
    fail(ErrorKind::ModelDefinition, "torus lengths must be positive");

  ReducedBasicComplex c;
  c.kind = ModelKind::TorusBase;
  c.codimension = 2;
  c.leaf_dimension = 1;
  c.geom.kind = BaseKind::Torus;
  c.geom.torus = TorusBasis{CircleBasis{l1, truncation}, CircleBasis{l2, truncation}};
  c.quad = c.geom.torus.quadrature(tol::quadrature_factor);
  const Mat base = c.geom.torus.values_on_grid(tol::quadrature_factor);
  const Eigen::Index m = base.cols();
  const Eigen::Index n = base.rows();

  c.sectors.push_back(generator_sector(base, {"1"}));
  c.sectors.push_back(generator_sector(base, {"dx", "dy"}));
  c.sectors.push_back(generator_sector(base, {"dx^dy"}));

  const Mat dx = c.geom.torus.diff_x();
  const Mat dy = c.geom.torus.diff_y();
  Mat d0(2 * m, m);
  d0.topRows(m) = dx;
  d0.bottomRows(m) = dy;
  Mat d1(m, 2 * m);
  d1.leftCols(m) = -dy;
  d1.rightCols(m) = dx;
  c.d = {d0, d1};
  c.star = {Mat::Identity(m, m), rotation_star(m), Mat::Identity(m, m)};

  attach_weight(c, log_fiber_volume);
  Vec kv = Vec::Zero(2 * n);
  if (log_fiber_volume && !log_fiber_volume->is_zero())
    kv = -literal_gradient(c.geom, *log_fiber_volume);
  attach_kappa(c, kv);

  c.curvature.transversal_scalar = 0.0;
  if (kv.isZero(0.0)) c.curvature.kappa_sq = 0.0;

  c.descriptor.kind = ModelKind::TorusBase;
  c.descriptor.name = model_kind_name(c.kind);
  c.descriptor.truncation = truncation;
  c.descriptor.length = l1;
  c.descriptor.length_y = l2;
  c.descriptor.log_weight = log_fiber_volume;
  finish(c);
  return c;
}

namespace {

ReducedBasicComplex build_sphere_complex(double radius, int truncation,
                                         ModelKind kind) {
  require_truncation(truncation);
  if (!(radius > 0.0)) fail(ErrorKind::ModelDefinition, "radius must be positive");

  ReducedBasicComplex c;
  c.kind = kind;
  c.codimension = 2;
  c.leaf_dimension = 1;
  c.geom.kind = BaseKind::Sphere;
  auto grid = std::make_shared<SphereGrid>(make_sphere_grid(truncation, radius));
  auto tables = std::make_shared<HarmonicTables>(harmonic_tables(*grid));
  c.geom.sphere = grid;
  c.geom.sphere_tables = tables;
  c.quad = grid->quad;

  SphereSectors sec = sphere_sectors(*grid, *tables);
  c.sectors = {sec.scalar, sec.oneform, sec.twoform};

  const Eigen::Index nsc = sec.scalar.dim;
  const Eigen::Index nve = nsc - 1;
  Mat d0 = Mat::Zero(2 * nve, nsc);
  Mat d1 = Mat::Zero(nsc, 2 * nve);
  for (int l = 1; l <= truncation; ++l) {
    const double root = std::sqrt(double(l) * (l + 1)) / radius;
    for (Eigen::Index k = l * l; k < (l + 1) * Eigen::Index(l + 1); ++k) {
      d0(k - 1, k) = root;        // gradient family picks up sqrt(lambda)
      d1(k, nve + (k - 1)) = -root;  // rotated family maps to dual functions
    }
  }
  c.d = {d0, d1};
  c.star = {Mat::Identity(nsc, nsc), rotation_star(nve), Mat::Identity(nsc, nsc)};

  attach_weight(c, std::nullopt);
  attach_kappa(c, Vec::Zero(2 * grid->nodes()));

  c.curvature.transversal_scalar = 2.0 / (radius * radius);
  c.curvature.kappa_sq = 0.0;

  c.descriptor.kind = kind;
  c.descriptor.name = model_kind_name(kind);
  c.descriptor.truncation = truncation;
  c.descriptor.radius = radius;
  finish(c);
  return c;
}

}  // namespace

ReducedBasicComplex build_sphere_base_model(double radius, int truncation) {
  return build_sphere_complex(radius, truncation, ModelKind::SphereBase);
}

ReducedBasicComplex build_hopf_de_rham_model(int truncation) {
  ReducedBasicComplex c =
      build_sphere_complex(0.5, truncation, ModelKind::HopfDeRham);
  c.curvature.ambient_scalar = 6.0;
  c.curvature.leaf_scalar = 0.0;
  c.curvature.oneill_a_sq = 2.0;
  c.curvature.oneill_t_sq = 0.0;
  return c;
}

ReducedBasicComplex build_hopf_spinor_model(double radius, int truncation) {
  require_truncation(truncation);
  if (!(radius > 0.0)) fail(ErrorKind::ModelDefinition, "radius must be positive");

  ReducedBasicComplex c;
  c.kind = ModelKind::HopfSpinor;
  c.module = ModuleKind::Spinor;
  c.codimension = 2;
  c.leaf_dimension = 1;

  // Half-spinor sectors share the ladder basis (l = k + 1/2, m = -l..l for
  // k = 0..truncation-1).  The off-diagonal blocks are diagonal with entry
  // (l + 1/2)/r on each (l, m) state.
  Eigen::Index dim = 0;
  for (int k = 0; k < truncation; ++k) dim += 2 * (k + 1);
  GradedMatrix dirac({dim, dim}, {dim, dim});
  Mat block = Mat::Zero(dim, dim);
  Eigen::Index at = 0;
  for (int k = 0; k < truncation; ++k) {
    const double value = double(k + 1) / radius;
    for (int m = 0; m < 2 * (k + 1); ++m) block(at + m, at + m) = value;
    at += 2 * (k + 1);
  }
  dirac.set_block(0, 1, block);
  dirac.set_block(1, 0, block);
  dirac.name = "dirac-basic";
  dirac.symmetric_wrt_weight = true;
  c.structural_dirac = std::move(dirac);

  c.curvature.transversal_scalar = 2.0 / (radius * radius);
  c.curvature.kappa_sq = 0.0;
  if (radius == 0.5) {
    c.curvature.ambient_scalar = 6.0;
    c.curvature.leaf_scalar = 0.0;
    c.curvature.oneill_a_sq = 2.0;
    c.curvature.oneill_t_sq = 0.0;
  }

  c.descriptor.kind = ModelKind::HopfSpinor;
  c.descriptor.name = model_kind_name(c.kind);
  c.descriptor.truncation = truncation;
  c.descriptor.radius = radius;
  c.validate();
  return c;
}

ModelDescriptor default_descriptor(ModelKind kind) {
  ModelDescriptor d;
  d.kind = kind;
  d.name = model_kind_name(kind);
  switch (kind) {
    case ModelKind::Carriere:
      d.truncation = 24;
      break;
    case ModelKind::CircleFibration:
      d.truncation = 24;
      break;
    case ModelKind::TorusBase:
      d.truncation = 8;
      break;
    case ModelKind::SphereBase:
      d.truncation = 8;
      d.radius = 1.0;
      break;
    case ModelKind::HopfDeRham:
      d.truncation = 8;
      d.radius = 0.5;
      break;
    case ModelKind::HopfSpinor:
      d.truncation = 12;
      d.radius = 0.5;
      break;
    case ModelKind::Synthetic:
      d.truncation = 0;  // the descriptor file decides
      break;
  }
  return d;
}

ReducedBasicComplex build_model(const ModelDescriptor& desc) {
  switch (desc.kind) {
    case ModelKind::Carriere:
      return build_carriere_model(desc.monodromy, desc.truncation);
    case ModelKind::CircleFibration:
      return build_circle_fibration_model(desc.length, desc.log_weight,
                                          desc.truncation);
    case ModelKind::TorusBase:
      return build_torus_base_model(desc.length, desc.length_y, desc.log_weight,
                                    desc.truncation);
    case ModelKind::SphereBase:
      return build_sphere_base_model(desc.radius, desc.truncation);
    case ModelKind::HopfDeRham:
      return build_hopf_de_rham_model(desc.truncation);
    case ModelKind::HopfSpinor:
      return build_hopf_spinor_model(desc.radius, desc.truncation);
    case ModelKind::Synthetic:
      if (desc.synthetic_source.empty())
        fail(ErrorKind::Usage, "synthetic models need a descriptor file");
      return load_synthetic_model(desc.synthetic_source, desc.truncation);
  }
  fail(ErrorKind::Internal, "unhandled model kind");
}

std::vector<ModelInfo> list_models() {
  std::vector<ModelInfo> out;
  const auto add = [&](ModelKind kind, std::string summary) {
    const ModelDescriptor d = default_descriptor(kind);
    out.push_back({d.name, 0, "", d.truncation, std::move(summary)});
    ModelInfo& info = out.back();
    switch (kind) {
      case ModelKind::CircleFibration:
        info.codimension = 1;
        break;
      default:
        info.codimension = 2;
        break;
    }
    info.module = kind == ModelKind::HopfSpinor ? "spinor" : "de-rham";
  };
  add(ModelKind::Carriere,
      "mapping-torus flow with hyperbolic monodromy; non-taut, constant mean "
      "curvature along the base circle");
  add(ModelKind::CircleFibration,
      "circle bundle over a circle with adjustable fiber volume; q = 1");
  add(ModelKind::TorusBase,
      "flat transverse torus; taut by default, supports the signature operator");
  add(ModelKind::SphereBase,
      "round transverse two-sphere of adjustable radius; taut");
  add(ModelKind::HopfDeRham,
      "round two-sphere of radius 1/2 with the curvature constants of the "
      "unit-sphere circle fibration");
  add(ModelKind::HopfSpinor,
      "spinor module over the radius-1/2 two-sphere; ladder-built Dirac blocks");
  return out;
}

}  // namespace folspec
