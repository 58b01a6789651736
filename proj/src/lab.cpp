#include "folspec/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "folspec/tolerances.hpp"
#include "model_util.hpp"

namespace folspec {

namespace {

std::string fmtg(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string join_counts(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

bool is_sphere_family(ModelKind kind) {
  return kind == ModelKind::SphereBase || kind == ModelKind::HopfDeRham ||
         kind == ModelKind::HopfSpinor;
}

std::string model_label(const ReducedBasicComplex& c) {
  return c.descriptor.name.empty() ? model_kind_name(c.descriptor.kind)
                                   : c.descriptor.name;
}

unsigned thread_budget(std::size_t tasks) {
  unsigned t = 0;
  if (const char* env = std::getenv("FOLSPEC_THREADS"))
    t = unsigned(std::strtoul(env, nullptr, 10));
  if (t == 0) t = std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  return unsigned(std::min<std::size_t>(t, tasks));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = thread_budget(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Gradient of a base-function literal, stacked to the one-form frame of this
// complex.  A circle base under a codimension-2 complex only fills the first
// frame component; the second direction sees no variation.
Vec stacked_gradient(const ReducedBasicComplex& c, const WeightLiteral& phi) {
  Vec g = literal_gradient(c.geom, phi);
  const Eigen::Index need = Eigen::Index(c.sectors.at(1).components) * c.quad.nodes();
  if (g.size() == need) return g;
  if (g.size() > need)
    fail(ErrorKind::Internal, "literal gradient has more components than the frame");
  Vec out = Vec::Zero(need);
  out.head(g.size()) = g;
  return out;
}

Mat gather(const Mat& m, const std::vector<Eigen::Index>& idx) {
  const Eigen::Index n = Eigen::Index(idx.size());
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[std::size_t(i)], idx[std::size_t(j)]);
  return out;
}

// Positions of the coarse coefficient basis inside the fine one, across all
// sectors.  Families nest by construction; the torus tensor basis needs its
// column index remapped.
std::vector<Eigen::Index> embedding_indices(const ReducedBasicComplex& fine,
                                            const ReducedBasicComplex& coarse) {
  if (fine.sectors.size() != coarse.sectors.size())
    fail(ErrorKind::Internal, "cannot embed complexes with different gradings");
  std::vector<Eigen::Index> idx;
  Eigen::Index fine_offset = 0;
  for (std::size_t k = 0; k < fine.sectors.size(); ++k) {
    const SectorBasis& fs = fine.sectors[k];
    const SectorBasis& cs = coarse.sectors[k];
    if (fs.family_labels != cs.family_labels)
      fail(ErrorKind::Internal, "cannot embed sectors with different families");
    for (std::size_t f = 0; f < fs.family_dims.size(); ++f) {
      if (cs.family_dims[f] > fs.family_dims[f])
        fail(ErrorKind::Internal, "coarse family larger than fine family");
      const Eigen::Index at = fine_offset + fs.family_offset(f);
      if (fine.geom.kind == BaseKind::Torus) {
        const Eigen::Index ny_f = fine.geom.torus.by.dim();
        const Eigen::Index ny_c = coarse.geom.torus.by.dim();
        for (Eigen::Index i = 0; i < cs.family_dims[f]; ++i)
          idx.push_back(at + (i / ny_c) * ny_f + i % ny_c);
      } else {
        for (Eigen::Index i = 0; i < cs.family_dims[f]; ++i) idx.push_back(at + i);
      }
    }
    fine_offset += fs.dim;
  }
  return idx;
}

}  // namespace

std::string verdict_of(const std::vector<CheckResult>& checks) {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (!c.passed && c.conclusive) return "fail";
    if (!c.conclusive) inconclusive = true;
  }
  return inconclusive ? "inconclusive" : "pass";
}

ReducedBasicComplex realize_model(const ModelDescriptor& desc) {
  ReducedBasicComplex c = build_model(desc);
  for (const auto& phi : desc.deformations) c = deform(c, phi);
  return c;
}

ModelDescriptor refined_descriptor(const ModelDescriptor& desc) {
  ModelDescriptor out = desc;
  out.truncation += is_sphere_family(desc.kind) ? 2 : 4;
  return out;
}

ReducedBasicComplex deform(const ReducedBasicComplex& base, const WeightLiteral& phi) {
  if (!base.is_de_rham())
    fail(ErrorKind::UnsupportedModel,
         "metric deformations act on the weight; this model has no de Rham "
         "complex to deform");
  ReducedBasicComplex c = base;
  c.log_weight_values += literal_values(c.geom, phi);
  c.weight_values = c.log_weight_values.array().exp();
  const Vec kv = c.kappa_values - stacked_gradient(c, phi);
  detail::attach_kappa(c, kv);
  // The transverse metric is untouched, so transverse curvature survives;
  // everything tied to the ambient metric does not.
  CurvatureData kept;
  kept.transversal_scalar = c.curvature.transversal_scalar;
  c.curvature = kept;
  c.descriptor.deformations.push_back(phi);
  detail::finish(c);
  return c;
}

HarmonicityReport check_basic_harmonic(const ReducedBasicComplex& c) {
  HarmonicityReport r;
  if (!c.is_de_rham()) {
    r.harmonic = true;
    return r;
  }
  const Vec k = c.kappa_coeffs;
  const Mat g1 = gram_matrix(c, 1);
  r.kappa_norm = std::sqrt(k.dot(g1 * k));
  if (c.codimension >= 2) {
    const Vec dk = c.d[1] * k;
    r.d_defect = std::sqrt(dk.dot(gram_matrix(c, 2) * dk));
  }
  const GradedMatrix delta = assemble_codifferential(c, CodifferentialVariant::Basic);
  const Vec sk = delta.block(1, 0) * k;
  r.delta_defect = std::sqrt(sk.dot(gram_matrix(c, 0) * sk));
  const double gate = tol::adjoint * std::max(1.0, r.kappa_norm);
  r.harmonic = r.d_defect <= gate && r.delta_defect <= gate;
  return r;
}

ConjugationReport check_conjugation(const ModelDescriptor& desc,
                                    const WeightLiteral& phi) {
  const ReducedBasicComplex coarse = realize_model(desc);
  if (!coarse.is_de_rham())
    fail(ErrorKind::UnsupportedModel,
         "conjugation transport needs the de Rham module");
  // Buffer sized so the conjugator's out-of-band tail is far below the
  // check tolerance; the tensor and sphere bases grow fast, and a small
  // buffer already buys factorial decay.
  const int buffer =
      coarse.geom.kind == BaseKind::Circle ? tol::dealias_buffer : 4;
  ModelDescriptor fine_desc = coarse.descriptor;
  fine_desc.truncation = coarse.descriptor.truncation + buffer;
  const ReducedBasicComplex base = realize_model(fine_desc);
  const ReducedBasicComplex deformed = deform(base, phi);

  const Mat d0 = assemble_dirac(base, DiracVariant::Basic).dense();
  const Mat d1 = assemble_dirac(deformed, DiracVariant::Basic).dense();

  const Vec conj_values = (-0.5 * literal_values(base.geom, phi)).array().exp();
  const Mat u = assemble_multiplication(deformed, conj_values, "conjugator").dense();
  const Mat transported = u.partialPivLu().solve(d1 * u);

  const Vec grad = stacked_gradient(deformed, phi);
  const Mat shift =
      0.5 * (assemble_form_action(deformed, grad, FormAction::Wedge, "dphi").dense() -
             assemble_form_action(deformed, grad, FormAction::Contract, "dphi").dense());

  const auto idx = embedding_indices(base, coarse);
  const double scale = std::max(1.0, d0.norm());
  ConjugationReport r;
  r.dirac_norm = d0.norm();
  r.conjugation_defect = gather(transported - d0, idx).norm() / scale;
  r.difference_defect = gather(d1 - d0 - shift, idx).norm() / scale;
  r.passed = r.conjugation_defect <= tol::conjugation &&
             r.difference_defect <= tol::conjugation;
  return r;
}

std::vector<WeightLiteral> default_invariance_weights(const ModelDescriptor& desc) {
  std::vector<std::string> texts;
  if (is_sphere_family(desc.kind))
    texts = {"harmonic:0,0.5", "harmonic:0,0,0.3", "harmonic:0,0,0,0.2,0.25"};
  else
    texts = {"fourier:0,0,1", "fourier:0,0,0,1", "fourier:0,0,0.3,0,0,0.2"};
  std::vector<WeightLiteral> out;
  for (const auto& t : texts) out.push_back(WeightLiteral::parse(t));
  return out;
}

ExperimentResult run_invariance_experiment(const ModelDescriptor& desc,
                                           const InvarianceOptions& options) {
  const ReducedBasicComplex base = realize_model(desc);
  if (!base.is_de_rham())
    fail(ErrorKind::UnsupportedModel,
         "the invariance experiment varies the weight; this model has no "
         "weight to vary");
  const std::vector<WeightLiteral> weights =
      options.weights.empty() ? default_invariance_weights(base.descriptor)
                              : options.weights;
  const double rel = options.rel_tol > 0 ? options.rel_tol : tol::invariance_rel;
  const int count = options.count > 0 ? options.count : 20;

  const std::size_t total = weights.size() + 1;
  std::vector<ReducedBasicComplex> complexes(total);
  std::vector<Spectrum> spectra(total);
  parallel_for(total, [&](std::size_t i) {
    complexes[i] = i == 0 ? base : deform(base, weights[i - 1]);
    spectra[i] = compute_spectrum(
        complexes[i], assemble_dirac(complexes[i], DiracVariant::Basic), count);
  });

  ExperimentResult out;
  const std::string model = model_label(base);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < total; ++i) {
    labels.push_back(i == 0 ? "base" : "weight=" + weights[i - 1].text());
    out.runs.push_back({model, labels.back(), spectra[i]});
  }

  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j) {
      const auto cmp = compare_spectra(spectra[i], spectra[j], rel);
      CheckResult c;
      c.name = "invariance:" + labels[i] + "|" + labels[j];
      c.passed = cmp.passed;
      c.conclusive = cmp.conclusive;
      c.measured = cmp.max_relative_deviation;
      c.bound = rel;
      c.note = cmp.detail;
      out.checks.push_back(std::move(c));
    }

  if (!weights.empty()) {
    // Deformed weight with a stale mean curvature: dropping the kappa shift
    // breaks the conjugation back to the base operator, so the spectrum has
    // to move.  (Flipping the sign of the correction instead would be inert:
    // D + (dphi contract - dphi wedge)/2 is exactly exp(phi/2) D exp(-phi/2).)
    // The assembly path refuses a complex whose kappa does not match its
    // weight, so the halves are put together here by hand.
    ReducedBasicComplex miswired = complexes[1];
    miswired.kappa_values = base.kappa_values;
    miswired.kappa_coeffs = base.kappa_coeffs;
    miswired.kappa_tail = base.kappa_tail;
    const GradedMatrix stale =
        assemble_d(miswired) -
        assemble_kappa_action(miswired, FormAction::Wedge) * 0.5;
    GradedMatrix adjoint = GradedMatrix::square(miswired.sector_dims());
    for (const auto& [key, blk] : stale.blocks()) {
      const Mat g_in = gram_matrix(miswired, key.first);
      const Mat g_out = gram_matrix(miswired, key.second);
      adjoint.set_block(key.second, key.first,
                        g_in.llt().solve(blk.transpose() * g_out));
    }
    GradedMatrix wrong = stale + adjoint;
    wrong.name = "dirac-miswired";
    wrong.symmetric_wrt_weight = false;
    const VecC moved = nonsymmetric_spectrum(miswired, wrong, count);

    double deviation = 0.0;
    const Eigen::Index m =
        std::min<Eigen::Index>(spectra[0].eigenvalues.size(), count);
    for (Eigen::Index i = 0; i < m; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < moved.size(); ++j)
        nearest = std::min(nearest,
                           std::abs(cplx(spectra[0].eigenvalues(i), 0.0) - moved(j)));
      deviation = std::max(
          deviation, nearest / std::max(1.0, std::abs(spectra[0].eigenvalues(i))));
    }
    CheckResult c;
    c.name = "invariance:negative-control";
    c.passed = deviation >= tol::negative_margin;
    c.measured = deviation;
    c.bound = tol::negative_margin;
    c.note = "an operator with the mean-curvature correction miswired must "
             "move the spectrum";
    out.checks.push_back(std::move(c));
  }
  return out;
}

ExperimentResult run_spectrum_experiment(const ModelDescriptor& desc, int count) {
  const ReducedBasicComplex c = realize_model(desc);
  const Spectrum s =
      compute_spectrum(c, assemble_dirac(c, DiracVariant::Basic), count);

  ExperimentResult out;
  std::string run = "base";
  if (!c.descriptor.deformations.empty()) {
    run = "weight=";
    for (std::size_t i = 0; i < c.descriptor.deformations.size(); ++i) {
      if (i) run += "+";
      run += c.descriptor.deformations[i].text();
    }
  }
  out.runs.push_back({model_label(c), run, s});

  CheckResult r;
  r.name = "spectrum:residuals";
  r.measured = s.residuals.size() > 0 ? s.residuals.maxCoeff() : 0.0;
  r.bound = tol::invariance_rel;
  r.passed = true;
  r.conclusive = r.measured <= r.bound;
  if (s.iterative) r.note = "iterative eigensolver";
  out.checks.push_back(std::move(r));
  return out;
}

ExperimentResult run_cohomology_experiment(const ModelDescriptor& desc) {
  const ReducedBasicComplex c = realize_model(desc);
  if (!c.is_de_rham())
    fail(ErrorKind::UnsupportedModel, "cohomology needs the de Rham module");
  const int q = c.codimension;

  BettiDiagnostics diag_plain, diag_tw, diag_mt;
  const auto b_plain = betti_numbers(c, DifferentialKind::Plain, &diag_plain);
  const auto b_tw = betti_numbers(c, DifferentialKind::TwistedDuality, &diag_tw);
  const auto b_mt = betti_numbers(c, DifferentialKind::MetricTwisted, &diag_mt);

  const ReducedBasicComplex fine = realize_model(refined_descriptor(c.descriptor));
  const auto f_plain = betti_numbers(fine, DifferentialKind::Plain);
  const auto f_tw = betti_numbers(fine, DifferentialKind::TwistedDuality);
  const auto f_mt = betti_numbers(fine, DifferentialKind::MetricTwisted);

  ExperimentResult out;
  auto table_note = [&](const std::vector<int>& a, const std::vector<int>& b) {
    return "d: " + join_counts(a) + "  " + differential_name(DifferentialKind::TwistedDuality) +
           ": " + join_counts(b);
  };

  {
    CheckResult r;
    r.name = "duality:pairing";
    bool ok = true;
    for (int k = 0; k <= q; ++k)
      ok = ok && b_plain[std::size_t(k)] == b_tw[std::size_t(q - k)];
    r.passed = ok;
    r.note = table_note(b_plain, b_tw);
    out.checks.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.name = "duality:self-dual-twisted";
    bool ok = true;
    for (int k = 0; k <= q; ++k)
      ok = ok && b_mt[std::size_t(k)] == b_mt[std::size_t(q - k)];
    r.passed = ok;
    r.note = differential_name(DifferentialKind::MetricTwisted) + ": " + join_counts(b_mt);
    out.checks.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.name = "cohomology:stability";
    const bool thresholds =
        diag_plain.threshold_stable && diag_tw.threshold_stable && diag_mt.threshold_stable;
    const bool refinement = b_plain == f_plain && b_tw == f_tw && b_mt == f_mt;
    r.passed = true;
    r.conclusive = thresholds && refinement;
    r.note = r.conclusive
                 ? "kernel counts stable under a x10 threshold and one refinement"
                 : "kernel counts shift with the threshold or the truncation";
    out.checks.push_back(std::move(r));
  }
  {
    const WeightLiteral phi = default_invariance_weights(c.descriptor)[0];
    const ReducedBasicComplex dc = deform(c, phi);
    const auto d_plain = betti_numbers(dc, DifferentialKind::Plain);
    const auto d_tw = betti_numbers(dc, DifferentialKind::TwistedDuality);
    const auto d_mt = betti_numbers(dc, DifferentialKind::MetricTwisted);

    CheckResult r;
    r.name = "duality:twisted-invariant-under-deformation";
    r.passed = d_mt == b_mt;
    r.note = "deformed by " + phi.text() + ": " + join_counts(d_mt);
    out.checks.push_back(std::move(r));

    CheckResult p;
    p.name = "duality:pairing-deformed";
    bool ok = true;
    for (int k = 0; k <= q; ++k)
      ok = ok && d_plain[std::size_t(k)] == d_tw[std::size_t(q - k)];
    p.passed = ok;
    p.note = table_note(d_plain, d_tw);
    out.checks.push_back(std::move(p));
  }
  return out;
}

ExperimentResult run_estimate_experiment(const ModelDescriptor& desc, int count) {
  const ReducedBasicComplex c = realize_model(desc);
  const Spectrum s = compute_spectrum(
      c, assemble_dirac(c, DiracVariant::Basic), std::max(count, 8));
  const double min_sq =
      s.eigenvalues.size() > 0 ? s.eigenvalues(0) * s.eigenvalues(0) : 0.0;

  ExperimentResult out;
  out.runs.push_back({model_label(c), "base", s});

  const int q = c.codimension;
  const double cq = q >= 2 ? q / (4.0 * (q - 1.0)) : 0.0;
  const auto& cur = c.curvature;
  const HarmonicityReport harm = check_basic_harmonic(c);

  struct Line {
    std::string name;
    bool have = false;
    double rhs = 0.0;
    std::string blocker;
  };
  std::vector<Line> lines;
  {
    Line l{"transversal-curvature", cur.transversal_scalar.has_value(), 0.0, ""};
    if (l.have) l.rhs = cq * *cur.transversal_scalar;
    lines.push_back(l);
  }
  {
    Line l;
    l.name = "harmonic-mean-curvature";
    l.have = cur.transversal_scalar && cur.kappa_sq;
    if (l.have) l.rhs = cq * (*cur.transversal_scalar + *cur.kappa_sq);
    if (l.have && !harm.harmonic) {
      l.have = false;
      l.blocker = "kappa_b is not basic-harmonic here (defects " +
                  fmtg(harm.d_defect) + ", " + fmtg(harm.delta_defect) + ")";
    }
    lines.push_back(l);
  }
  {
    Line l;
    l.name = "ambient-curvature";
    l.have = cur.ambient_scalar && cur.leaf_scalar && cur.oneill_a_sq && cur.oneill_t_sq;
    if (l.have)
      l.rhs = cq * (*cur.ambient_scalar - *cur.leaf_scalar + *cur.oneill_a_sq +
                    *cur.oneill_t_sq);
    lines.push_back(l);
  }
  {
    Line l;
    l.name = "flow";
    l.have = c.leaf_dimension == 1 && cur.ambient_scalar && cur.oneill_a_sq &&
             cur.kappa_sq;
    if (l.have) l.rhs = cq * (*cur.ambient_scalar + *cur.oneill_a_sq + *cur.kappa_sq);
    if (c.leaf_dimension != 1) l.blocker = "needs one-dimensional leaves";
    lines.push_back(l);
  }

  for (const auto& l : lines) {
    CheckResult r;
    r.name = "estimate:" + l.name;
    r.measured = min_sq;
    r.bound = l.rhs;
    r.passed = true;
    if (q < 2) {
      r.note = "needs codimension at least 2";
    } else if (!l.have) {
      r.note = l.blocker.empty()
                   ? "model does not supply the needed curvature constants"
                   : l.blocker;
    } else if (c.is_de_rham() && l.rhs > 0) {
      r.note = "a positive bound here is a statement about the spinor module; "
               "not asserted for differential forms";
    } else {
      const double slack = tol::estimate_slack * std::max(1.0, std::abs(l.rhs));
      r.passed = min_sq >= l.rhs - slack;
      if (std::abs(min_sq - l.rhs) <= slack)
        r.note = "limiting case: the lowest eigenvalue meets the bound exactly";
      else if (l.rhs <= 0 && c.is_de_rham())
        r.note = "bound " + fmtg(l.rhs) + " is not positive; holds trivially";
      else
        r.note = "lowest squared eigenvalue " + fmtg(min_sq) + " against bound " +
                 fmtg(l.rhs);
    }
    out.checks.push_back(std::move(r));
  }
  return out;
}

namespace {

// Lowest nonzero eigenvalue of the degree-0 block of the weighted Laplacian.
double lowest_nonzero_degree0(const ReducedBasicComplex& c) {
  const GradedMatrix l = laplacian_for(c, DifferentialKind::Plain);
  const Mat cb = orthonormal_change_of_basis(c).block(0, 0);
  const Mat b = cb.transpose() * gram_matrix(c, 0) * l.block(0, 0) * cb;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.transpose()),
                                        Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "Laplacian eigensolver did not converge");
  const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
  const double thresh = tol::kernel * std::max(1.0, lam_max);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) >= thresh) return es.eigenvalues()(i);
  fail(ErrorKind::Numerical, "no nonzero Laplacian eigenvalue at this truncation");
}

double lowest_nonzero_dirac(const ReducedBasicComplex& c) {
  const Spectrum s =
      compute_spectrum(c, assemble_dirac(c, DiracVariant::Basic), 40);
  const double top = s.eigenvalues.size() > 0 ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = tol::kernel * std::max(1.0, top);
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues(i)) >= thresh) return std::abs(s.eigenvalues(i));
  fail(ErrorKind::Numerical, "no nonzero Dirac eigenvalue at this truncation");
}

}  // namespace

ConvergenceReport run_convergence_study(const ModelDescriptor& desc,
                                        std::vector<int> truncations) {
  ModelDescriptor base = desc;
  if (truncations.empty()) {
    const int n = base.truncation > 0
                      ? base.truncation
                      : default_descriptor(base.kind).truncation;
    if (is_sphere_family(base.kind))
      truncations = {n, n + 2, n + 4};
    else if (base.kind == ModelKind::TorusBase)
      truncations = {n, n + 4, n + 8};  // the tensor basis grows quadratically
    else
      truncations = {n, 2 * n, 4 * n};
  }
  std::sort(truncations.begin(), truncations.end());
  truncations.erase(std::unique(truncations.begin(), truncations.end()),
                    truncations.end());
  if (truncations.size() < 3)
    fail(ErrorKind::Usage,
         "a convergence study needs at least three distinct truncation levels");

  ConvergenceReport rep;
  std::vector<ReducedBasicComplex> cs(truncations.size());
  parallel_for(truncations.size(), [&](std::size_t i) {
    ModelDescriptor d = base;
    d.truncation = truncations[i];
    cs[i] = realize_model(d);
  });

  rep.observable = cs[0].is_de_rham()
                       ? "lowest nonzero eigenvalue of the degree-0 weighted Laplacian"
                       : "lowest nonzero Dirac eigenvalue modulus";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    ConvergenceLevel lev;
    lev.truncation = truncations[i];
    lev.dimension = cs[i].total_dim();
    lev.observable =
        cs[i].is_de_rham() ? lowest_nonzero_degree0(cs[i]) : lowest_nonzero_dirac(cs[i]);
    if (cs[i].is_de_rham()) lev.betti = betti_numbers(cs[i], DifferentialKind::Plain);
    rep.levels.push_back(std::move(lev));
  }

  for (std::size_t i = 1; i < rep.levels.size(); ++i)
    rep.drifts.push_back(
        std::abs(rep.levels[i].observable - rep.levels[i - 1].observable) /
        std::max(1.0, std::abs(rep.levels.back().observable)));
  for (std::size_t i = 1; i < rep.levels.size(); ++i)
    rep.betti_stable = rep.betti_stable && rep.levels[i].betti == rep.levels[0].betti;

  std::string values;
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    if (i) values += "  ";
    values += std::to_string(rep.levels[i].truncation) + " -> ";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", rep.levels[i].observable);
    values += buf;
  }

  {
    CheckResult r;
    r.name = "convergence:observable";
    r.measured = rep.drifts.empty() ? 0.0 : rep.drifts.back();
    r.bound = tol::invariance_rel;
    r.passed = r.measured <= r.bound;
    r.note = rep.observable + ": " + values;
    rep.result.checks.push_back(std::move(r));
  }
  if (cs[0].is_de_rham()) {
    CheckResult r;
    r.name = "convergence:betti";
    r.passed = rep.betti_stable;
    r.note = "degree-wise kernel counts across levels";
    rep.result.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace folspec
