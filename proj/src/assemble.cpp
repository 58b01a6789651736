#include "folspec/assemble.hpp"

#include <cmath>

#include "folspec/tolerances.hpp"

namespace folspec {

namespace {

void require_de_rham(const ReducedBasicComplex& c, const char* what) {
  if (!c.is_de_rham())
    fail(ErrorKind::UnsupportedModel,
         std::string(what) + " requires the de Rham module");
}

GradedMatrix empty_like(const ReducedBasicComplex& c) {
  return GradedMatrix::square(c.sector_dims());
}

// Frame components of a stacked node-value matrix.
Eigen::Block<const Mat> comp(const Mat& stacked, int component, Eigen::Index n) {
  return stacked.middleRows(component * n, n);
}

// Pointwise wedge of the one-form with node values a = (a1[, a2]) against a
// degree-k value table; returns the degree-(k+1) value table.
Mat wedge_values(const ReducedBasicComplex& c, const Vec& a, int k, const Mat& s) {
  const Eigen::Index n = c.quad.nodes();
  const int q = c.codimension;
  if (q == 1) {
    return a.asDiagonal() * s;  // k == 0
  }
  const Vec a1 = a.head(n), a2 = a.tail(n);
  if (k == 0) {
    Mat out(2 * n, s.cols());
    out.topRows(n) = a1.asDiagonal() * s;
    out.bottomRows(n) = a2.asDiagonal() * s;
    return out;
  }
  return a1.asDiagonal() * comp(s, 1, n) - a2.asDiagonal() * comp(s, 0, n);
}

// Pointwise metric adjoint of the wedge, degree k -> k-1.
Mat contract_values(const ReducedBasicComplex& c, const Vec& a, int k, const Mat& s) {
  const Eigen::Index n = c.quad.nodes();
  const int q = c.codimension;
  if (q == 1) {
    return a.asDiagonal() * s;  // k == 1
  }
  const Vec a1 = a.head(n), a2 = a.tail(n);
  if (k == 1)
    return a1.asDiagonal() * comp(s, 0, n) + a2.asDiagonal() * comp(s, 1, n);
  Mat out(2 * n, s.cols());
  out.topRows(n) = (-a2).asDiagonal() * s;
  out.bottomRows(n) = a1.asDiagonal() * s;
  return out;
}

}  // namespace

GradedMatrix assemble_d(const ReducedBasicComplex& c) {
  require_de_rham(c, "the exterior derivative");
  GradedMatrix m = empty_like(c);
  m.name = "d";
  m.aliasing_tail = c.structure_tail;
  for (int k = 0; k < c.codimension; ++k) m.set_block(k, k + 1, c.d[std::size_t(k)]);
  return m;
}

GradedMatrix assemble_hodge_star(const ReducedBasicComplex& c) {
  require_de_rham(c, "the transverse star");
  GradedMatrix m = empty_like(c);
  m.name = "hodge-star";
  for (int k = 0; k <= c.codimension; ++k)
    m.set_block(k, c.codimension - k, c.star[std::size_t(k)]);
  return m;
}

GradedMatrix assemble_form_action(const ReducedBasicComplex& c, const Vec& av,
                                  FormAction mode, const std::string& label) {
  require_de_rham(c, "a one-form action");
  const int q = c.codimension;
  const Eigen::Index n = c.quad.nodes();
  if (av.size() != c.sectors[1].components * n)
    fail(ErrorKind::Internal, "one-form node values have the wrong shape");
  GradedMatrix m = empty_like(c);
  m.name = (mode == FormAction::Wedge ? "wedge:" : "contract:") + label;
  double tail = 0.0;
  if (mode == FormAction::Wedge) {
    for (int k = 0; k < q; ++k) {
      const Mat out = wedge_values(c, av, k, c.sectors[std::size_t(k)].values);
      auto pr = project_onto(c.sectors[std::size_t(k) + 1], c.quad, c.weight_values, out);
      m.set_block(k, k + 1, std::move(pr.coeffs));
      tail = std::max(tail, pr.tail);
    }
  } else {
    for (int k = 1; k <= q; ++k) {
      const Mat out = contract_values(c, av, k, c.sectors[std::size_t(k)].values);
      auto pr = project_onto(c.sectors[std::size_t(k) - 1], c.quad, c.weight_values, out);
      m.set_block(k, k - 1, std::move(pr.coeffs));
      tail = std::max(tail, pr.tail);
    }
  }
  m.aliasing_tail = tail;
  return m;
}

GradedMatrix assemble_kappa_action(const ReducedBasicComplex& c, FormAction mode) {
  return assemble_form_action(c, c.kappa_values, mode, "kappa_b");
}

GradedMatrix assemble_multiplication(const ReducedBasicComplex& c, const Vec& fv,
                                     const std::string& label) {
  require_de_rham(c, "a multiplication operator");
  const Eigen::Index n = c.quad.nodes();
  if (fv.size() != n) fail(ErrorKind::Internal, "function node values have the wrong size");
  GradedMatrix m = empty_like(c);
  m.name = "multiply:" + label;
  double tail = 0.0;
  for (int k = 0; k <= c.codimension; ++k) {
    const auto& sec = c.sectors[std::size_t(k)];
    Mat out(sec.values.rows(), sec.dim);
    for (int comp_i = 0; comp_i < sec.components; ++comp_i)
      out.middleRows(comp_i * n, n) = fv.asDiagonal() * comp(sec.values, comp_i, n);
    auto pr = project_onto(sec, c.quad, c.weight_values, out);
    m.set_block(k, k, std::move(pr.coeffs));
    tail = std::max(tail, pr.tail);
  }
  m.aliasing_tail = tail;
  return m;
}

namespace {

Mat star_d_star_block(const ReducedBasicComplex& c, int k) {
  const int q = c.codimension;
  return c.star[std::size_t(q - k + 1)] * c.d[std::size_t(q - k)] * c.star[std::size_t(k)];
}

}  // namespace

std::vector<int> codifferential_signs(const ReducedBasicComplex& c) {
  require_de_rham(c, "the codifferential");
  const int q = c.codimension;
  const GradedMatrix kc = assemble_kappa_action(c, FormAction::Contract);
  std::vector<int> signs;
  for (int k = 1; k <= q; ++k) {
    const Mat cand = star_d_star_block(c, k);
    // Classical closed-manifold sign, used when the block cannot decide.
    const int classical = (q * (k + 1) + 1) % 2 == 0 ? 1 : -1;
    if (op_norm(cand) <= 1e-13 * std::max(1.0, op_norm(c.d[std::size_t(k - 1)]))) {
      signs.push_back(classical);
      continue;
    }
    const Mat target = c.d[std::size_t(k - 1)].transpose() * c.gram[std::size_t(k)];
    const Mat contract_block = kc.block(k, k - 1);
    const double scale = std::max(1.0, op_norm(target));
    double best_defect = 0.0;
    int best_sign = 0;
    for (int s : {1, -1}) {
      const Mat delta = double(s) * cand + contract_block;
      const double defect = op_norm(Mat(c.gram[std::size_t(k - 1)] * delta - target));
      if (best_sign == 0 || defect < best_defect) {
        best_sign = s;
        best_defect = defect;
      }
    }
    if (best_defect > tol::adjoint * scale)
      fail(ErrorKind::ModelDefinition,
           "no sign of star-d-star makes the codifferential the weighted "
           "adjoint of d in degree " + std::to_string(k));
    signs.push_back(best_sign);
  }
  return signs;
}

GradedMatrix assemble_codifferential(const ReducedBasicComplex& c,
                                     CodifferentialVariant variant) {
  const std::vector<int> signs = codifferential_signs(c);
  GradedMatrix m = empty_like(c);
  m.name = variant == CodifferentialVariant::Transversal ? "codifferential-transversal"
                                                         : "codifferential-basic";
  for (int k = 1; k <= c.codimension; ++k)
    m.set_block(k, k - 1, double(signs[std::size_t(k - 1)]) * star_d_star_block(c, k));
  if (variant == CodifferentialVariant::Basic) {
    const GradedMatrix kc = assemble_kappa_action(c, FormAction::Contract);
    m = m + kc;
    m.name = "codifferential-basic";
    m.aliasing_tail = kc.aliasing_tail;
  }
  return m;
}

std::pair<GradedMatrix, GradedMatrix> assemble_twisted_pair(
    const ReducedBasicComplex& c) {
  const GradedMatrix wedge = assemble_kappa_action(c, FormAction::Wedge);
  const GradedMatrix contract = assemble_kappa_action(c, FormAction::Contract);
  GradedMatrix dt = assemble_d(c) - wedge * 0.5;
  dt.name = "d-tilde";
  dt.aliasing_tail = wedge.aliasing_tail;
  GradedMatrix del = assemble_codifferential(c, CodifferentialVariant::Basic) -
                     contract * 0.5;
  del.name = "delta-tilde";
  del.aliasing_tail = contract.aliasing_tail;
  return {std::move(dt), std::move(del)};
}

GradedMatrix assemble_dirac(const ReducedBasicComplex& c, DiracVariant variant) {
  if (!c.is_de_rham()) {
    GradedMatrix m = *c.structural_dirac;
    m.name = variant == DiracVariant::Transversal ? "dirac-transversal" : "dirac-basic";
    m.symmetric_wrt_weight = true;
    return m;
  }
  if (variant == DiracVariant::Transversal) {
    GradedMatrix m = assemble_d(c) +
                     assemble_codifferential(c, CodifferentialVariant::Transversal);
    m.name = "dirac-transversal";
    return m;
  }
  auto [dt, del] = assemble_twisted_pair(c);
  GradedMatrix m = dt + del;
  m.name = "dirac-basic";
  m.symmetric_wrt_weight = true;
  m.aliasing_tail = std::max(dt.aliasing_tail, del.aliasing_tail);
  return m;
}

GradedMatrix assemble_laplacian(const ReducedBasicComplex& c, LaplacianVariant variant) {
  GradedMatrix m;
  if (!c.is_de_rham()) {
    const GradedMatrix dirac = assemble_dirac(c, DiracVariant::Basic);
    m = dirac.compose(dirac);
  } else if (variant == LaplacianVariant::Basic) {
    const GradedMatrix dd = assemble_d(c);
    const GradedMatrix del = assemble_codifferential(c, CodifferentialVariant::Basic);
    m = dd.compose(del) + del.compose(dd);
  } else {
    auto [dt, del] = assemble_twisted_pair(c);
    m = dt.compose(del) + del.compose(dt);
  }
  m.name = variant == LaplacianVariant::Basic ? "laplacian-basic" : "laplacian-twisted";
  m.symmetric_wrt_weight = true;
  return m;
}

GradedMatrix assemble_twisted_duality_differential(const ReducedBasicComplex& c) {
  const GradedMatrix wedge = assemble_kappa_action(c, FormAction::Wedge);
  GradedMatrix m = assemble_d(c) - wedge;
  m.name = "d-minus-kappa";
  m.aliasing_tail = wedge.aliasing_tail;
  return m;
}

Mat gram_matrix(const ReducedBasicComplex& c, int degree) {
  if (!c.is_de_rham()) return Mat::Identity(c.dim(degree), c.dim(degree));
  if (degree < 0 || degree > c.codimension)
    fail(ErrorKind::Internal, "no sector of degree " + std::to_string(degree));
  return c.gram[std::size_t(degree)];
}

GradedMatrix orthonormal_change_of_basis(const ReducedBasicComplex& c) {
  GradedMatrix m = GradedMatrix::square(c.sector_dims());
  m.name = "orthonormalize";
  const int top = c.is_de_rham() ? c.codimension : int(c.sector_dims().size()) - 1;
  for (int k = 0; k <= top; ++k) {
    const Mat g = gram_matrix(c, k);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > tol::gram_condition)
      fail(ErrorKind::Numerical,
           "Gram matrix too ill-conditioned for an orthonormal change of basis");
    Eigen::LLT<Mat> llt(g);
    const Mat lt = llt.matrixU();
    m.set_block(k, k, lt.triangularView<Eigen::Upper>().solve(
                          Mat::Identity(g.rows(), g.cols())));
  }
  return m;
}

SignatureOperator assemble_signature_operator(const ReducedBasicComplex& c) {
  require_de_rham(c, "the signature operator");
  const int q = c.codimension;
  if (q % 2 != 0)
    fail(ErrorKind::UnsupportedModel,
         "the signature operator needs even codimension, got q = " + std::to_string(q));

  const cplx powers[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  SignatureOperator sig;
  sig.involution = GradedMatrixC::square(c.sector_dims());
  sig.involution.name = "signature-involution";
  for (int k = 0; k <= q; ++k) {
    const int expo = (k * (k - 1) + q / 2) % 4;
    sig.involution.set_block(k, q - k,
                             powers[expo] * c.star[std::size_t(k)].cast<cplx>());
  }

  const MatC inv = sig.involution.dense();
  const Eigen::Index n = inv.rows();
  if (op_norm(MatC(inv * inv - MatC::Identity(n, n))) > tol::square * double(n))
    fail(ErrorKind::Internal, "signature involution does not square to the identity");

  const MatC dirac = assemble_dirac(c, DiracVariant::Basic).complexified().dense();
  const double anti = op_norm(MatC(inv * dirac + dirac * inv));
  if (anti > tol::anticommute * std::max(1.0, op_norm(dirac)))
    fail(ErrorKind::Internal,
         "signature involution fails to anticommute with the Dirac operator");

  const auto eigen_basis = [&](double sign) {
    const MatC proj = 0.5 * (MatC::Identity(n, n) + sign * inv);
    Eigen::ColPivHouseholderQR<MatC> qr(proj);
    qr.setThreshold(1e-8);
    const Eigen::Index rank = qr.rank();
    return MatC(qr.householderQ() * MatC::Identity(n, rank));
  };
  sig.plus_basis = eigen_basis(1.0);
  sig.minus_basis = eigen_basis(-1.0);
  sig.dim_plus = sig.plus_basis.cols();
  sig.dim_minus = sig.minus_basis.cols();
  sig.dirac_plus_to_minus = sig.minus_basis.adjoint() * dirac * sig.plus_basis;
  return sig;
}

}  // namespace folspec
