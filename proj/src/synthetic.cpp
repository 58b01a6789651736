#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "folspec/models.hpp"
#include "folspec/tolerances.hpp"
#include "json.hpp"
#include "model_util.hpp"

namespace folspec {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& label, const std::string& msg) {
  fail(ErrorKind::Schema, label + ": " + msg);
}

void require_keys(const json& obj, const std::string& label, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      schema_fail(label, "unknown field '" + it.key() + "' in " + where);
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_field(const json& obj, const std::string& label, const char* key) {
  const json* v = find(obj, key);
  if (!v) schema_fail(label, std::string("missing required field '") + key + "'");
  return *v;
}

double as_number(const json& v, const std::string& label, const std::string& what) {
  if (!v.is_number()) schema_fail(label, what + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& label, const std::string& what) {
  if (!v.is_number_integer()) schema_fail(label, what + " must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& label, const std::string& what) {
  if (!v.is_string()) schema_fail(label, what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& label,
                                    const std::string& what) {
  if (!v.is_array()) schema_fail(label, what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) schema_fail(label, what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vec padded(const std::vector<double>& coeffs, Eigen::Index dim,
           const std::string& label, const std::string& what) {
  if (Eigen::Index(coeffs.size()) > dim)
    schema_fail(label, "coefficient array for " + what + " exceeds the truncated basis (" +
                           std::to_string(coeffs.size()) + " > " + std::to_string(dim) + ")");
  Vec out = Vec::Zero(dim);
  for (std::size_t i = 0; i < coeffs.size(); ++i) out(Eigen::Index(i)) = coeffs[i];
  return out;
}

// Multiplication by the function with node values cvals, as a matrix on the
// orthonormal coefficient basis.  tail accumulates the relative norm dropped
// by the truncation.
Mat mult_matrix(const Mat& values, const Quadrature& quad, const Vec& cvals,
                double& tail) {
  const Vec wq = quad.weights.array() * cvals.array();
  Mat m = values.transpose() * wq.asDiagonal() * values;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const Vec prod = cvals.array() * values.col(j).array();
    const double full = (quad.weights.array() * prod.array().square()).sum();
    if (full <= 0) continue;
    const double kept = m.col(j).squaredNorm();
    tail = std::max(tail, std::sqrt(std::max(0.0, full - kept) / full));
  }
  return m;
}

std::vector<std::vector<std::string>> parse_generators(const json& v, int q,
                                                       const std::string& label) {
  if (!v.is_array() || int(v.size()) != q + 1)
    schema_fail(label, "generators must list one name array per degree 0.." +
                           std::to_string(q));
  std::vector<int> expected = q == 1 ? std::vector<int>{1, 1} : std::vector<int>{1, 2, 1};
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> seen;
  for (int k = 0; k <= q; ++k) {
    const json& deg = v[std::size_t(k)];
    if (!deg.is_array() || int(deg.size()) != expected[std::size_t(k)])
      schema_fail(label, "degree " + std::to_string(k) + " needs exactly " +
                             std::to_string(expected[std::size_t(k)]) +
                             " generator name(s)");
    std::vector<std::string> names;
    for (const auto& e : deg) {
      std::string name = as_string(e, label, "a generator name");
      if (name.empty()) schema_fail(label, "generator names must be non-empty");
      for (const auto& s : seen)
        if (s == name) schema_fail(label, "generator name '" + name + "' is repeated");
      seen.push_back(name);
      names.push_back(std::move(name));
    }
    out.push_back(std::move(names));
  }
  return out;
}

}  // namespace

ReducedBasicComplex parse_synthetic_model(const std::string& json_text,
                                          const std::string& source_label,
                                          int truncation_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    schema_fail(source_label, std::string("descriptor is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_fail(source_label, "descriptor must be a JSON object");
  require_keys(doc, source_label, "the descriptor",
               {"schema_version", "name", "codimension", "leaf_dimension", "base",
                "truncation", "generators", "structure", "weight", "kappa_b",
                "curvature"});

  if (as_int(require_field(doc, source_label, "schema_version"), source_label,
             "schema_version") != 1)
    schema_fail(source_label, "schema_version must be 1");

  std::string name = "synthetic";
  if (const json* v = find(doc, "name")) name = as_string(*v, source_label, "name");

  const int q = as_int(require_field(doc, source_label, "codimension"), source_label,
                       "codimension");
  if (q != 1 && q != 2) schema_fail(source_label, "codimension must be 1 or 2");

  int leaf_dim = 1;
  if (const json* v = find(doc, "leaf_dimension")) {
    leaf_dim = as_int(*v, source_label, "leaf_dimension");
    if (leaf_dim < 1) schema_fail(source_label, "leaf_dimension must be at least 1");
  }

  const json& base = require_field(doc, source_label, "base");
  if (!base.is_object()) schema_fail(source_label, "base must be an object");
  const std::string kind =
      as_string(require_field(base, source_label, "kind"), source_label, "base kind");
  bool torus = false;
  double ell = 1.0, ell_y = 1.0;
  if (kind == "circle") {
    require_keys(base, source_label, "base", {"kind", "length"});
    if (const json* v = find(base, "length")) ell = as_number(*v, source_label, "length");
  } else if (kind == "torus") {
    torus = true;
    require_keys(base, source_label, "base", {"kind", "length_x", "length_y"});
    if (const json* v = find(base, "length_x"))
      ell = as_number(*v, source_label, "length_x");
    if (const json* v = find(base, "length_y"))
      ell_y = as_number(*v, source_label, "length_y");
    if (q != 2) schema_fail(source_label, "a torus base needs codimension 2");
  } else if (kind == "sphere") {
    fail(ErrorKind::UnsupportedModel,
         source_label +
             ": synthetic descriptors do not support a sphere base; use the built-in "
             "sphere models");
  } else {
    schema_fail(source_label, "base kind must be 'circle' or 'torus'");
  }
  if (ell <= 0 || ell_y <= 0) schema_fail(source_label, "base lengths must be positive");

  int truncation = as_int(require_field(doc, source_label, "truncation"), source_label,
                          "truncation");
  if (truncation_override > 0) truncation = truncation_override;
  detail::require_truncation(truncation);

  const auto generators =
      parse_generators(require_field(doc, source_label, "generators"), q, source_label);

  ReducedBasicComplex c;
  c.kind = ModelKind::Synthetic;
  c.module = ModuleKind::DeRham;
  c.codimension = q;
  c.leaf_dimension = leaf_dim;
  c.descriptor.kind = ModelKind::Synthetic;
  c.descriptor.name = name;
  c.descriptor.truncation = truncation;
  c.descriptor.length = ell;
  c.descriptor.length_y = ell_y;
  c.descriptor.synthetic_source = source_label;

  Mat base_values;
  if (torus) {
    c.geom.kind = BaseKind::Torus;
    c.geom.torus.bx = CircleBasis{ell, truncation};
    c.geom.torus.by = CircleBasis{ell_y, truncation};
    base_values = c.geom.torus.values_on_grid();
    c.quad = c.geom.torus.quadrature();
  } else {
    c.geom.kind = BaseKind::Circle;
    c.geom.circle = CircleBasis{ell, truncation};
    base_values = c.geom.circle.values_at(c.geom.circle.collocation_nodes());
    c.quad = c.geom.circle.quadrature();
  }
  const Eigen::Index m = base_values.cols();

  for (int k = 0; k <= q; ++k)
    c.sectors.push_back(detail::generator_sector(base_values, generators[std::size_t(k)]));

  // Structure functions give the derivative of each degree-1 generator as a
  // multiple of the top generator.
  Mat struct_mult[2] = {Mat::Zero(m, m), Mat::Zero(m, m)};
  if (const json* v = find(doc, "structure")) {
    if (!v->is_array()) schema_fail(source_label, "structure must be an array");
    if (!v->empty() && (torus || q != 2))
      schema_fail(source_label,
                  "structure constants need a circle base with codimension 2");
    std::vector<std::string> used;
    for (const auto& entry : *v) {
      if (!entry.is_object())
        schema_fail(source_label, "structure entries must be objects");
      require_keys(entry, source_label, "a structure entry",
                   {"generator", "coefficients"});
      const std::string gen = as_string(require_field(entry, source_label, "generator"),
                                        source_label, "generator");
      int which = -1;
      for (int i = 0; i < 2; ++i)
        if (generators[1][std::size_t(i)] == gen) which = i;
      if (which < 0)
        schema_fail(source_label,
                    "structure names unknown degree-1 generator '" + gen + "'");
      for (const auto& u : used)
        if (u == gen)
          schema_fail(source_label, "structure lists generator '" + gen + "' twice");
      used.push_back(gen);
      const auto coeffs =
          as_number_array(require_field(entry, source_label, "coefficients"),
                          source_label, "coefficients");
      const Vec cvals = base_values * padded(coeffs, m, source_label, "'" + gen + "'");
      struct_mult[which] = mult_matrix(base_values, c.quad, cvals, c.structure_tail);
    }
  }

  if (q == 1) {
    c.d = {c.geom.circle.diff()};
    c.star = {Mat::Identity(m, m), Mat::Identity(m, m)};
  } else if (torus) {
    Mat d0(2 * m, m);
    d0.topRows(m) = c.geom.torus.diff_x();
    d0.bottomRows(m) = c.geom.torus.diff_y();
    Mat d1(m, 2 * m);
    d1.leftCols(m) = -c.geom.torus.diff_y();
    d1.rightCols(m) = c.geom.torus.diff_x();
    c.d = {d0, d1};
    c.star = {Mat::Identity(m, m), detail::rotation_star(m), Mat::Identity(m, m)};
  } else {
    const Mat D = c.geom.circle.diff();
    Mat d0 = Mat::Zero(2 * m, m);
    d0.topRows(m) = D;
    Mat d1(m, 2 * m);
    d1.leftCols(m) = struct_mult[0];
    d1.rightCols(m) = D + struct_mult[1];
    c.d = {d0, d1};
    c.star = {Mat::Identity(m, m), detail::rotation_star(m), Mat::Identity(m, m)};

    const double defect = (d1 * d0).norm();
    const double scale = std::max(1.0, D.norm() * std::max(1.0, d1.norm()));
    if (defect > tol::square * scale)
      fail(ErrorKind::ModelDefinition,
           source_label + ": d*d does not vanish: generators '" + generators[1][0] +
               "' -> '" + generators[2][0] + "' fail to cancel in d(d f)");
  }

  if (const json* v = find(doc, "weight")) {
    const auto coeffs = as_number_array(*v, source_label, "weight");
    c.weight_values = base_values * padded(coeffs, m, source_label, "the weight");
    if (c.weight_values.minCoeff() <= 0)
      fail(ErrorKind::ModelDefinition,
           source_label + ": weight must be strictly positive at every quadrature node");
    c.log_weight_values = c.weight_values.array().log();
  } else {
    c.weight_values = Vec::Ones(c.quad.nodes());
    c.log_weight_values = Vec::Zero(c.quad.nodes());
  }

  Vec kv = Vec::Zero(Eigen::Index(c.sectors[1].components) * c.quad.nodes());
  if (const json* v = find(doc, "kappa_b")) {
    if (!v->is_object()) schema_fail(source_label, "kappa_b must be an object");
    for (auto it = v->begin(); it != v->end(); ++it) {
      int which = -1;
      for (std::size_t i = 0; i < generators[1].size(); ++i)
        if (generators[1][i] == it.key()) which = int(i);
      if (which < 0)
        schema_fail(source_label,
                    "kappa_b names unknown degree-1 generator '" + it.key() + "'");
      const auto coeffs = as_number_array(*it, source_label, "kappa_b['" + it.key() + "']");
      kv.segment(which * c.quad.nodes(), c.quad.nodes()) =
          base_values * padded(coeffs, m, source_label, "kappa_b['" + it.key() + "']");
    }
  }
  detail::attach_kappa(c, kv);

  if (const json* v = find(doc, "curvature")) {
    if (!v->is_object()) schema_fail(source_label, "curvature must be an object");
    require_keys(*v, source_label, "curvature",
                 {"transversal_scalar", "ambient_scalar", "leaf_scalar", "oneill_a_sq",
                  "oneill_t_sq", "kappa_sq"});
    auto grab = [&](const char* key, std::optional<double>& slot) {
      if (const json* f = find(*v, key))
        slot = as_number(*f, source_label, std::string("curvature.") + key);
    };
    grab("transversal_scalar", c.curvature.transversal_scalar);
    grab("ambient_scalar", c.curvature.ambient_scalar);
    grab("leaf_scalar", c.curvature.leaf_scalar);
    grab("oneill_a_sq", c.curvature.oneill_a_sq);
    grab("oneill_t_sq", c.curvature.oneill_t_sq);
    grab("kappa_sq", c.curvature.kappa_sq);
  }

  detail::finish(c);
  return c;
}

ReducedBasicComplex load_synthetic_model(const std::string& path,
                                         int truncation_override) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot read descriptor file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_synthetic_model(text.str(), path, truncation_override);
}

}  // namespace folspec
