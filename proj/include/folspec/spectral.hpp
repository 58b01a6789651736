#pragma once

#include <string>
#include <utility>
#include <vector>

#include "folspec/assemble.hpp"

namespace folspec {

/// Lowest slice of the spectrum of a weight-symmetric operator, sorted by
/// modulus (negative first on ties) and closed under clusters.
struct Spectrum {
  std::string operator_name;
  Eigen::Index dimension = 0;
  int truncation = 0;
  Vec eigenvalues;
  Vec residuals;  // relative 2-norm residuals of the whitened eigenpairs
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [begin, end)
  bool iterative = false;
};

/// Eigenvalues of `op` for the weighted inner product of the complex.
/// `count` <= 0 asks for the full spectrum.  Operators whose weighted
/// symmetry defect exceeds tolerance are refused rather than symmetrized.
Spectrum compute_spectrum(const ReducedBasicComplex& complex, const GradedMatrix& op,
                          int count);

/// Dense symmetric solve on an already-whitened matrix.
Spectrum lowest_eigenvalues_dense(const Mat& sym, int count);

/// Shift-invert Lanczos with full reorthogonalization; the path taken past
/// the dense size cutoff.
Spectrum lowest_eigenvalues_lanczos(const Mat& sym, int count);

/// Complex eigenvalues of a deliberately non-symmetric operator, sorted by
/// modulus.  The invariance negative control lands here.
VecC nonsymmetric_spectrum(const ReducedBasicComplex& complex, const GradedMatrix& op,
                           int count);

struct SpectrumComparison {
  double max_relative_deviation = 0.0;
  Eigen::Index compared = 0;
  bool aligned = true;     // cluster multiplicities match over the compared range
  bool conclusive = true;  // residuals small enough to resolve rel_tol
  bool passed = false;
  std::string detail;
};

/// Index-wise comparison of two spectra sorted the same way.  Deviations are
/// relative with floor 1; residuals above rel_tol / 10 make it inconclusive.
SpectrumComparison compare_spectra(const Spectrum& a, const Spectrum& b, double rel_tol);

/// Differential whose cohomology a Betti computation refers to.
enum class DifferentialKind {
  Plain,           // d
  TwistedDuality,  // d - kappa wedge
  MetricTwisted,   // d - (1/2) kappa wedge
};
std::string differential_name(DifferentialKind kind);

/// Hodge Laplacian of the chosen differential and its weighted adjoint;
/// block-diagonal across degrees.
GradedMatrix laplacian_for(const ReducedBasicComplex& complex, DifferentialKind kind);

struct BettiDiagnostics {
  double threshold = 0.0;
  bool threshold_stable = true;     // counts unchanged at 10x threshold
  std::vector<double> kernel_gap;   // smallest eigenvalue kept out, per degree
};

/// Kernel dimensions of the degree blocks of laplacian_for, with a relative
/// zero threshold and a x10 stability probe.  Truncation stability is the
/// caller's job.
std::vector<int> betti_numbers(const ReducedBasicComplex& complex, DifferentialKind kind,
                               BettiDiagnostics* diag = nullptr);

}  // namespace folspec
