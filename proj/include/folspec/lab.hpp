#pragma once

#include <optional>
#include <string>
#include <vector>

#include "folspec/models.hpp"
#include "folspec/spectral.hpp"

namespace folspec {

/// One named verification with its measured value and the bound it was held
/// to.  `conclusive` false means the numerics could not resolve the question.
struct CheckResult {
  std::string name;
  bool passed = true;
  bool conclusive = true;
  double measured = 0.0;
  double bound = 0.0;
  std::string note;
};

/// A spectrum computed during an experiment, labelled by model and run.
struct SpectrumRun {
  std::string model;
  std::string run;
  Spectrum spectrum;
};

struct ExperimentResult {
  std::vector<SpectrumRun> runs;
  std::vector<CheckResult> checks;
};

/// pass / fail / inconclusive across a set of checks.
std::string verdict_of(const std::vector<CheckResult>& checks);

/// Build a model and apply its descriptor's deformations in order.
ReducedBasicComplex realize_model(const ModelDescriptor& desc);

/// Same model one refinement step finer (for stability probes).
ModelDescriptor refined_descriptor(const ModelDescriptor& desc);

/// Change the bundle-like metric keeping the transverse part: multiply the
/// weight by exp(phi).  The mean curvature form shifts by -d(phi); curvature
/// constants that depend on the ambient metric are dropped.
ReducedBasicComplex deform(const ReducedBasicComplex& base, const WeightLiteral& phi);

/// Norms of d(kappa) and of the weighted codifferential of kappa.
struct HarmonicityReport {
  double kappa_norm = 0.0;
  double d_defect = 0.0;
  double delta_defect = 0.0;
  bool harmonic = false;
};
HarmonicityReport check_basic_harmonic(const ReducedBasicComplex& complex);

/// Conjugation transport between the basic Dirac operators of a model and
/// its deformation, checked on a buffered truncation and restricted back.
struct ConjugationReport {
  double conjugation_defect = 0.0;  // U^{-1} D' U - D on the embedded block
  double difference_defect = 0.0;   // D' - D against the closed-form shift
  double dirac_norm = 0.0;
  bool passed = false;
};
ConjugationReport check_conjugation(const ModelDescriptor& desc,
                                    const WeightLiteral& phi);

struct InvarianceOptions {
  std::vector<WeightLiteral> weights;  // empty -> registry defaults
  int count = 20;
  double rel_tol = 0.0;  // <= 0 -> default tolerance
};

/// Weights used when an invariance run does not specify any.
std::vector<WeightLiteral> default_invariance_weights(const ModelDescriptor& desc);

/// Basic Dirac spectra across deformations of one model, compared pairwise,
/// plus a deliberately miswired operator that must move the spectrum.
ExperimentResult run_invariance_experiment(const ModelDescriptor& desc,
                                           const InvarianceOptions& options);

/// Lowest basic Dirac eigenvalues of one model.
ExperimentResult run_spectrum_experiment(const ModelDescriptor& desc, int count);

/// Betti numbers of the three differentials: pairing of d against the
/// twisted differential, self-duality of the metric-twisted one, and its
/// invariance under a deformation.
ExperimentResult run_cohomology_experiment(const ModelDescriptor& desc);

/// The four lower bounds for the squared Dirac eigenvalues, evaluated where
/// the model supplies curvature data and the module makes them assertions.
ExperimentResult run_estimate_experiment(const ModelDescriptor& desc, int count);

/// Spectral observable and Betti numbers across a truncation ladder.
struct ConvergenceLevel {
  int truncation = 0;
  Eigen::Index dimension = 0;
  double observable = 0.0;
  std::vector<int> betti;
};
struct ConvergenceReport {
  std::string observable;
  std::vector<ConvergenceLevel> levels;
  std::vector<double> drifts;
  bool betti_stable = true;
  ExperimentResult result;
};
ConvergenceReport run_convergence_study(const ModelDescriptor& desc,
                                        std::vector<int> truncations = {});

}  // namespace folspec
