#include "folspec/validate.hpp"

#include <cmath>

#include "folspec/tolerances.hpp"

namespace folspec {

namespace {

double rel(double defect, double scale) { return defect / std::max(1.0, scale); }

Mat block_gram(const ReducedBasicComplex& c) {
  const auto dims = c.sector_dims();
  Eigen::Index total = 0;
  for (auto d : dims) total += d;
  Mat g = Mat::Zero(total, total);
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    g.block(at, at, dims[k], dims[k]) = gram_matrix(c, int(k));
    at += dims[k];
  }
  return g;
}

void add(ExperimentResult& out, const std::string& model, const std::string& what,
         double measured, double bound, const std::string& note = "") {
  CheckResult r;
  r.name = "validate:" + model + ":" + what;
  r.measured = measured;
  r.bound = bound;
  r.passed = measured <= bound;
  r.note = note;
  out.checks.push_back(std::move(r));
}

void de_rham_suite(ExperimentResult& out, const ReducedBasicComplex& c,
                   const std::string& model) {
  const int q = c.codimension;
  const GradedMatrix d = assemble_d(c);
  const GradedMatrix star = assemble_hodge_star(c);
  const GradedMatrix delta = assemble_codifferential(c, CodifferentialVariant::Basic);
  const GradedMatrix tw = assemble_twisted_duality_differential(c);
  const auto [dt, del_t] = assemble_twisted_pair(c);
  const GradedMatrix dirac = assemble_dirac(c, DiracVariant::Basic);
  const Mat g = block_gram(c);

  const double sd = d.norm();
  add(out, model, "d-squared", rel(d.compose(d).norm(), sd * sd), tol::square);
  add(out, model, "twisted-differential-squared", rel(tw.compose(tw).norm(), tw.norm() * tw.norm()),
      tol::square);
  add(out, model, "metric-twisted-squared", rel(dt.compose(dt).norm(), dt.norm() * dt.norm()),
      tol::square);
  add(out, model, "metric-twisted-adjoint-squared",
      rel(del_t.compose(del_t).norm(), del_t.norm() * del_t.norm()), tol::square);

  {
    double worst = 0.0;
    for (int k = 0; k <= q; ++k) {
      const double sign = ((k * (q - k)) % 2 == 0) ? 1.0 : -1.0;
      const Mat round = star.block(q - k, k) * star.block(k, q - k);
      worst = std::max(worst,
                       (round - sign * Mat::Identity(round.rows(), round.cols())).norm());
    }
    add(out, model, "star-sign-law", worst, tol::square);
  }

  add(out, model, "codifferential-adjoint",
      rel((g * delta.dense() - d.dense().transpose() * g).norm(), sd * g.norm()),
      tol::adjoint);
  add(out, model, "twisted-pair-adjoint",
      rel((g * del_t.dense() - dt.dense().transpose() * g).norm(), dt.norm() * g.norm()),
      tol::adjoint);

  {
    const GradedMatrix wedge = assemble_kappa_action(c, FormAction::Wedge);
    const GradedMatrix contract = assemble_kappa_action(c, FormAction::Contract);
    add(out, model, "curvature-action-adjoint",
        rel((g * contract.dense() - wedge.dense().transpose() * g).norm(),
            std::max(1.0, wedge.norm()) * g.norm()),
        tol::adjoint);
  }

  add(out, model, "dirac-weighted-symmetry",
      rel((g * dirac.dense() - dirac.dense().transpose() * g).norm(),
          dirac.norm() * g.norm()),
      tol::symmetry);

  {
    // delta_b against star (d - kappa wedge) star, with the per-degree sign
    // left free: the mechanism behind the degree pairing of the two
    // cohomologies.
    double worst = 0.0;
    std::string signs;
    for (int k = 1; k <= q; ++k) {
      const Mat m = star.block(q - k + 1, k - 1) * tw.block(q - k, q - k + 1) *
                    star.block(k, q - k);
      const Mat lhs = delta.block(k, k - 1);
      const double plus = (lhs - m).norm();
      const double minus = (lhs + m).norm();
      worst = std::max(worst, rel(std::min(plus, minus), sd));
      signs += (plus <= minus ? "+" : "-");
    }
    add(out, model, "duality-intertwining", worst, tol::intertwine,
        "signs per degree: " + signs);
  }

  if (q % 2 == 0) {
    const SignatureOperator sig = assemble_signature_operator(c);
    CheckResult r;
    r.name = "validate:" + model + ":signature-split";
    r.passed = sig.dim_plus == sig.dim_minus;
    r.measured = double(sig.dim_plus - sig.dim_minus);
    r.note = "eigenspace dimensions " + std::to_string(sig.dim_plus) + " / " +
             std::to_string(sig.dim_minus);
    out.checks.push_back(std::move(r));
  }
}

void spinor_suite(ExperimentResult& out, const ReducedBasicComplex& c,
                  const std::string& model) {
  const GradedMatrix dirac = assemble_dirac(c, DiracVariant::Basic);
  const Mat dd = dirac.dense();
  add(out, model, "dirac-symmetry", rel((dd - dd.transpose()).norm(), dd.norm()),
      tol::symmetry);
  const GradedMatrix lap = assemble_laplacian(c, LaplacianVariant::Twisted);
  Eigen::SelfAdjointEigenSolver<Mat> es(lap.dense(), Eigen::EigenvaluesOnly);
  add(out, model, "laplacian-nonnegative", std::max(0.0, -es.eigenvalues().minCoeff()),
      tol::symmetry * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()),
      "squared Dirac operator");
}

}  // namespace

ExperimentResult run_validation_suite(const ModelDescriptor& desc) {
  ExperimentResult out;
  const ReducedBasicComplex c = realize_model(desc);
  const std::string model = c.descriptor.name.empty()
                                ? model_kind_name(c.descriptor.kind)
                                : c.descriptor.name;
  if (c.is_de_rham()) {
    de_rham_suite(out, c, model);
    const ConjugationReport conj =
        check_conjugation(c.descriptor, default_invariance_weights(c.descriptor)[0]);
    add(out, model, "conjugation-transport", conj.conjugation_defect, tol::conjugation,
        "restricted to the embedded coarse block");
    add(out, model, "conjugation-difference", conj.difference_defect, tol::conjugation,
        "Dirac shift against the closed-form gradient term");
  } else {
    spinor_suite(out, c, model);
  }
  return out;
}

ExperimentResult run_validation_suite() {
  ExperimentResult out;
  for (const auto& info : list_models()) {
    ExperimentResult one = run_validation_suite(default_descriptor(
        model_kind_from_name(info.name)));
    for (auto& r : one.runs) out.runs.push_back(std::move(r));
    for (auto& ch : one.checks) out.checks.push_back(std::move(ch));
  }
  return out;
}

}  // namespace folspec
