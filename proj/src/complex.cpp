#include "folspec/complex.hpp"

#include <charconv>
#include <cmath>

#include "folspec/tolerances.hpp"

namespace folspec {

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Carriere: return "carriere";
    case ModelKind::CircleFibration: return "circle-fibration";
    case ModelKind::TorusBase: return "torus-base";
    case ModelKind::SphereBase: return "sphere-base";
    case ModelKind::HopfDeRham: return "hopf-de-rham";
    case ModelKind::HopfSpinor: return "hopf-spinor";
    case ModelKind::Synthetic: return "synthetic";
  }
  fail(ErrorKind::Internal, "unhandled model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::Carriere, ModelKind::CircleFibration,
                      ModelKind::TorusBase, ModelKind::SphereBase,
                      ModelKind::HopfDeRham, ModelKind::HopfSpinor,
                      ModelKind::Synthetic})
    if (model_kind_name(k) == name) return k;
  fail(ErrorKind::Usage, "unknown model '" + name + "'");
}

namespace {

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trimmed(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorKind::Usage, "bad number '" + s + "' in weight literal");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

WeightLiteral WeightLiteral::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    fail(ErrorKind::Usage,
         "weight literal must look like 'fourier:a0,a1c,a1s,...' or "
         "'harmonic:c0,c1,...', got '" + text + "'");
  const std::string family = trimmed(text.substr(0, colon));
  WeightLiteral lit;
  if (family == "fourier")
    lit.family = Family::Fourier;
  else if (family == "harmonic")
    lit.family = Family::Harmonic;
  else
    fail(ErrorKind::Usage, "unknown weight family '" + family + "'");
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item =
        rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    lit.coeffs.push_back(parse_double(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return lit;
}

std::string WeightLiteral::text() const {
  std::string out = family == Family::Fourier ? "fourier:" : "harmonic:";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) out += ',';
    out += format_double(coeffs[i]);
  }
  return out;
}

bool WeightLiteral::is_zero() const {
  for (double c : coeffs)
    if (c != 0.0) return false;
  return true;
}

namespace {

// Plain trig series and its derivative at given points.
void fourier_eval(const std::vector<double>& a, double ell, const Vec& t,
                  Vec* values, Vec* deriv) {
  if (values) values->setZero(t.size());
  if (deriv) deriv->setZero(t.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (i == 0) {
      if (values) values->array() += a[0];
      continue;
    }
    const int m = int((i + 1) / 2);
    const double w = 2.0 * pi * m / ell;
    const bool is_cos = (i % 2 == 1);
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      const double c = std::cos(w * t(j)), s = std::sin(w * t(j));
      if (values) (*values)(j) += a[i] * (is_cos ? c : s);
      if (deriv) (*deriv)(j) += a[i] * w * (is_cos ? -s : c);
    }
  }
}

Vec harmonic_coeff_vector(const BaseGeometry& geom, const WeightLiteral& lit) {
  const Eigen::Index avail = geom.sphere_tables->values.cols();
  if (Eigen::Index(lit.coeffs.size()) > avail)
    fail(ErrorKind::Usage, "harmonic literal has more coefficients than the "
                           "truncated harmonic basis");
  Vec c = Vec::Zero(avail);
  for (std::size_t i = 0; i < lit.coeffs.size(); ++i) c(Eigen::Index(i)) = lit.coeffs[i];
  return c;
}

}  // namespace

Vec literal_values(const BaseGeometry& geom, const WeightLiteral& lit) {
  if (geom.kind == BaseKind::Sphere) {
    if (lit.family != WeightLiteral::Family::Harmonic)
      fail(ErrorKind::Usage, "sphere-base models take 'harmonic:' weight literals");
    return geom.sphere_tables->values * harmonic_coeff_vector(geom, lit);
  }
  if (lit.family != WeightLiteral::Family::Fourier)
    fail(ErrorKind::Usage, "'harmonic:' weight literals need a sphere base");
  if (geom.kind == BaseKind::Circle) {
    Vec v;
    fourier_eval(lit.coeffs, geom.circle.ell,
                 geom.circle.collocation_nodes(tol::quadrature_factor), &v, nullptr);
    return v;
  }
  // Torus: the literal is a function of the first coordinate.
  const Vec tx = geom.torus.bx.collocation_nodes(tol::quadrature_factor);
  Vec vx;
  fourier_eval(lit.coeffs, geom.torus.bx.ell, tx, &vx, nullptr);
  const Eigen::Index ny = tol::quadrature_factor * geom.torus.by.dim();
  Vec v(tx.size() * ny);
  for (Eigen::Index jx = 0; jx < tx.size(); ++jx)
    v.segment(jx * ny, ny).setConstant(vx(jx));
  return v;
}

Vec literal_gradient(const BaseGeometry& geom, const WeightLiteral& lit) {
  if (geom.kind == BaseKind::Sphere) {
    if (lit.family != WeightLiteral::Family::Harmonic)
      fail(ErrorKind::Usage, "sphere-base models take 'harmonic:' weight literals");
    const Vec c = harmonic_coeff_vector(geom, lit);
    const auto& t = *geom.sphere_tables;
    const double r = geom.sphere->radius;
    Vec g(2 * geom.sphere->nodes());
    g.head(geom.sphere->nodes()) = (t.theta_deriv * c) / r;
    g.tail(geom.sphere->nodes()) = (t.phi_deriv_over_sin * c) / r;
    return g;
  }
  if (lit.family != WeightLiteral::Family::Fourier)
    fail(ErrorKind::Usage, "'harmonic:' weight literals need a sphere base");
  if (geom.kind == BaseKind::Circle) {
    Vec g;
    fourier_eval(lit.coeffs, geom.circle.ell,
                 geom.circle.collocation_nodes(tol::quadrature_factor), nullptr, &g);
    return g;
  }
  const Vec tx = geom.torus.bx.collocation_nodes(tol::quadrature_factor);
  Vec gx;
  fourier_eval(lit.coeffs, geom.torus.bx.ell, tx, nullptr, &gx);
  const Eigen::Index ny = tol::quadrature_factor * geom.torus.by.dim();
  const Eigen::Index n = tx.size() * ny;
  Vec g = Vec::Zero(2 * n);
  for (Eigen::Index jx = 0; jx < tx.size(); ++jx)
    g.segment(jx * ny, ny).setConstant(gx(jx));
  return g;
}

Eigen::Index ReducedBasicComplex::dim(int degree) const {
  if (is_de_rham()) {
    if (degree < 0 || degree > codimension) return 0;
    return sectors[std::size_t(degree)].dim;
  }
  if (degree < 0 || degree >= structural_dirac->sectors_in()) return 0;
  return structural_dirac->dim_in(degree);
}

std::vector<Eigen::Index> ReducedBasicComplex::sector_dims() const {
  if (!is_de_rham()) {
    std::vector<Eigen::Index> dims;
    for (int k = 0; k < structural_dirac->sectors_in(); ++k)
      dims.push_back(structural_dirac->dim_in(k));
    return dims;
  }
  std::vector<Eigen::Index> dims;
  for (const auto& s : sectors) dims.push_back(s.dim);
  return dims;
}

Eigen::Index ReducedBasicComplex::total_dim() const {
  Eigen::Index n = 0;
  for (auto d : sector_dims()) n += d;
  return n;
}

std::vector<Mat> weighted_grams(const ReducedBasicComplex& complex) {
  std::vector<Mat> grams;
  for (const auto& s : complex.sectors)
    grams.push_back(sector_gram(s, complex.quad, complex.weight_values));
  return grams;
}

void ReducedBasicComplex::validate() const {
  if (module == ModuleKind::Spinor) {
    if (!structural_dirac)
      fail(ErrorKind::Internal, "spinor complex is missing its Dirac matrix");
    const Mat full = structural_dirac->dense();
    const double defect = op_norm(Mat(full - full.transpose()));
    if (defect > tol::symmetry * std::max(1.0, op_norm(full)))
      fail(ErrorKind::Internal, "spinor Dirac matrix is not symmetric");
    return;
  }

  const int q = codimension;
  if (q < 1) fail(ErrorKind::ModelDefinition, "codimension must be >= 1");
  if (int(sectors.size()) != q + 1)
    fail(ErrorKind::Internal, "expected one sector per degree 0..q");
  const Eigen::Index nodes = quad.nodes();
  for (int k = 0; k <= q; ++k) {
    const auto& s = sectors[std::size_t(k)];
    if (s.dim <= 0 || s.values.rows() != s.components * nodes ||
        s.values.cols() != s.dim)
      fail(ErrorKind::Internal, "sector value table shape mismatch in degree " +
                                    std::to_string(k));
  }
  if (weight_values.size() != nodes || log_weight_values.size() != nodes)
    fail(ErrorKind::Internal, "weight tables do not match the quadrature");
  if (weight_values.minCoeff() <= 0.0)
    fail(ErrorKind::ModelDefinition,
         "weight must be strictly positive at every quadrature node");

  if (int(d.size()) != q) fail(ErrorKind::Internal, "expected q differential blocks");
  for (int k = 0; k < q; ++k)
    if (d[std::size_t(k)].rows() != dim(k + 1) || d[std::size_t(k)].cols() != dim(k))
      fail(ErrorKind::Internal, "differential block shape mismatch");
  for (int k = 0; k + 1 < q; ++k) {
    const Mat dd = d[std::size_t(k + 1)] * d[std::size_t(k)];
    const double scale =
        std::max(1.0, op_norm(d[std::size_t(k + 1)]) * op_norm(d[std::size_t(k)]));
    if (op_norm(dd) > tol::square * scale)
      fail(ErrorKind::ModelDefinition,
           "d*d does not vanish between degrees " + std::to_string(k) + " and " +
               std::to_string(k + 2));
  }

  if (int(star.size()) != q + 1) fail(ErrorKind::Internal, "expected q+1 star blocks");
  for (int k = 0; k <= q; ++k) {
    const auto& s = star[std::size_t(k)];
    if (s.rows() != dim(q - k) || s.cols() != dim(k))
      fail(ErrorKind::Internal, "star block shape mismatch");
    const double sign = (k * (q - k)) % 2 == 0 ? 1.0 : -1.0;
    const Mat defect = star[std::size_t(q - k)] * s -
                       sign * Mat::Identity(dim(k), dim(k));
    if (op_norm(defect) > tol::square)
      fail(ErrorKind::Internal,
           "transverse star violates its sign law in degree " + std::to_string(k));
  }

  if (int(gram.size()) != q + 1) fail(ErrorKind::Internal, "expected q+1 Gram matrices");
  for (int k = 0; k <= q; ++k) {
    const auto& g = gram[std::size_t(k)];
    if (g.rows() != dim(k) || g.cols() != dim(k))
      fail(ErrorKind::Internal, "Gram matrix shape mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0)
      fail(ErrorKind::ModelDefinition,
           "weighted Gram matrix is not positive definite in degree " +
               std::to_string(k));
    if (hi / lo > tol::gram_condition)
      fail(ErrorKind::Numerical,
           "weighted Gram matrix condition number exceeds the supported range");
  }

  if (kappa_coeffs.size() != dim(1))
    fail(ErrorKind::Internal, "kappa_b coefficients do not match the degree-1 sector");
  if (q >= 2) {
    const double defect = (d[1] * kappa_coeffs).norm();
    const double scale = std::max(1.0, op_norm(d[1]) * kappa_coeffs.norm());
    if (defect > tol::closed * scale)
      fail(ErrorKind::ModelDefinition, "kappa_b is not closed");
  }
}

}  // namespace folspec
