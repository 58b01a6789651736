#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "folspec/models.hpp"
#include "folspec/spectral.hpp"
#include "folspec/tolerances.hpp"

using namespace folspec;

namespace {

const Eigen::Matrix2i kStandardMonodromy = (Eigen::Matrix2i() << 2, 1, 1, 1).finished();

double expansion_rate() { return std::log((3.0 + std::sqrt(5.0)) / 2.0); }

// Modulus order with the negative branch first, the order spectra come in.
std::vector<double> modulus_sorted(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
  });
  return vals;
}

void check_against(const Vec& got, const std::vector<double>& oracle, double tol) {
  const Eigen::Index m = std::min<Eigen::Index>(got.size(), Eigen::Index(oracle.size()));
  REQUIRE(m > 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double floor = std::max({1.0, std::abs(got(i)), std::abs(oracle[std::size_t(i)])});
    CHECK(std::abs(got(i) - oracle[std::size_t(i)]) <= tol * floor);
  }
}

// Eigenvalues of one degree block for the weighted inner product, ascending.
Vec degree_block_eigenvalues(const ReducedBasicComplex& c, const GradedMatrix& op,
                             int degree) {
  const Mat a = op.block(degree, degree);
  const Mat g = gram_matrix(c, degree);
  const Mat ga = g * a;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (ga + ga.transpose()), g);
  REQUIRE(es.info() == Eigen::Success);
  return es.eigenvalues();
}

Spectrum hand_spectrum(std::vector<double> vals,
                       std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters) {
  Spectrum s;
  s.eigenvalues = Eigen::Map<Vec>(vals.data(), Eigen::Index(vals.size()));
  s.residuals = Vec::Zero(s.eigenvalues.size());
  s.clusters = std::move(clusters);
  s.dimension = s.eigenvalues.size();
  return s;
}

}  // namespace

TEST_CASE("mapping-torus Dirac spectrum matches the closed form") {
  const double lambda = expansion_rate();
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 12);
  const Spectrum s = compute_spectrum(c, assemble_dirac(c, DiracVariant::Basic), 20);

  std::vector<double> oracle;
  for (int copy = 0; copy < 2; ++copy) {
    oracle.push_back(lambda / 2);
    oracle.push_back(-lambda / 2);
  }
  for (int n = 1; n <= 3; ++n) {
    const double mu = std::sqrt(4 * pi * pi * n * n + lambda * lambda / 4);
    for (int copy = 0; copy < 4; ++copy) {
      oracle.push_back(mu);
      oracle.push_back(-mu);
    }
  }
  const auto sorted = modulus_sorted(oracle);

  CHECK(s.eigenvalues.size() == 20);  // count lands on a cluster boundary
  check_against(s.eigenvalues, sorted, 1e-10);
  CHECK(s.residuals.maxCoeff() < 1e-9);
  REQUIRE(s.clusters.size() >= 4);
  CHECK(s.clusters[0].second - s.clusters[0].first == 2);
  CHECK(s.clusters[1].second - s.clusters[1].first == 2);
  CHECK(s.clusters[2].second - s.clusters[2].first == 4);
  CHECK(s.clusters[3].second - s.clusters[3].first == 4);
}

TEST_CASE("a partial count is extended to the end of its cluster") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 8);
  const GradedMatrix dirac = assemble_dirac(c, DiracVariant::Basic);
  CHECK(compute_spectrum(c, dirac, 3).eigenvalues.size() == 4);
  CHECK(compute_spectrum(c, dirac, 5).eigenvalues.size() == 8);
}

TEST_CASE("mapping-torus scalar Laplacian carries the flow modes") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 12);
  const Vec ev =
      degree_block_eigenvalues(c, assemble_laplacian(c, LaplacianVariant::Basic), 0);

  std::vector<double> oracle = {0.0};
  for (int n = 1; n <= 5; ++n) {
    const double mode = 4 * pi * pi * n * n;
    oracle.push_back(mode);
    oracle.push_back(mode);
  }
  check_against(ev.head(Eigen::Index(oracle.size())), oracle, 1e-12);
}

TEST_CASE("fiber volume drops out of the circle-fibration Dirac spectrum") {
  const ReducedBasicComplex plain = build_circle_fibration_model(1.0, std::nullopt, 16);
  const ReducedBasicComplex weighted = build_circle_fibration_model(
      1.0, WeightLiteral::parse("fourier:0,0,1"), 16);

  std::vector<double> oracle = {0.0, 0.0};
  for (int n = 1; n <= 2; ++n)
    for (int copy = 0; copy < 2; ++copy) {
      oracle.push_back(2 * pi * n);
      oracle.push_back(-2 * pi * n);
    }
  const auto sorted = modulus_sorted(oracle);

  const Spectrum sp = compute_spectrum(plain, assemble_dirac(plain, DiracVariant::Basic), 10);
  const Spectrum sw =
      compute_spectrum(weighted, assemble_dirac(weighted, DiracVariant::Basic), 10);
  check_against(sp.eigenvalues, sorted, 1e-10);
  check_against(sw.eigenvalues, sorted, 1e-10);

  const SpectrumComparison cmp = compare_spectra(sp, sw, tol::invariance_rel);
  CHECK(cmp.passed);
  CHECK(cmp.aligned);
  CHECK(cmp.max_relative_deviation <= tol::invariance_rel);
}

TEST_CASE("round-sphere scalar Laplacian clusters by harmonic degree") {
  const ReducedBasicComplex c = build_sphere_base_model(0.5, 8);
  const Vec ev =
      degree_block_eigenvalues(c, assemble_laplacian(c, LaplacianVariant::Basic), 0);

  std::vector<double> oracle;
  for (int l = 0; l <= 3; ++l)
    for (int m = 0; m < 2 * l + 1; ++m) oracle.push_back(4.0 * l * (l + 1));
  check_against(ev.head(Eigen::Index(oracle.size())), oracle, 1e-10);
}

TEST_CASE("spinor Dirac spectrum is the symmetric ladder") {
  const ReducedBasicComplex c = build_hopf_spinor_model(0.5, 8);
  const Spectrum s = compute_spectrum(c, assemble_dirac(c, DiracVariant::Basic), 12);

  std::vector<double> oracle;
  for (int k = 0; k < 2; ++k)
    for (int copy = 0; copy < 2 * (k + 1); ++copy) {
      oracle.push_back(2.0 * (k + 1));
      oracle.push_back(-2.0 * (k + 1));
    }
  const auto sorted = modulus_sorted(oracle);

  CHECK(s.eigenvalues.size() == 12);
  check_against(s.eigenvalues, sorted, 1e-10);
  CHECK(std::abs(s.eigenvalues(0)) > 1.0);  // no kernel anywhere near zero
  REQUIRE(s.clusters.size() == 4);
  CHECK(s.clusters[0].second - s.clusters[0].first == 2);
  CHECK(s.clusters[2].second - s.clusters[2].first == 4);
}

TEST_CASE("iterative and dense eigensolvers agree near the spectral center") {
  const Eigen::Index n = 150;
  Rng rng(97);
  Mat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = 1e-3 * rng.vector(n);
  Mat sym = 0.5 * (m + m.transpose());
  for (Eigen::Index i = 0; i < n; ++i) sym(i, i) += double(i) - double(n) / 2 + 0.5;

  const Spectrum dense = lowest_eigenvalues_dense(sym, 10);
  const Spectrum iter = lowest_eigenvalues_lanczos(sym, 10);
  CHECK_FALSE(dense.iterative);
  CHECK(iter.iterative);
  REQUIRE(iter.eigenvalues.size() >= 10);
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(dense.eigenvalues(i) ==
          doctest::Approx(iter.eigenvalues(i)).epsilon(1e-9).scale(1.0));
  CHECK(iter.residuals.head(10).maxCoeff() < 1e-8);
}

TEST_CASE("spectrum comparison verdicts") {
  const Spectrum a = hand_spectrum({1, 1, 2, 2}, {{0, 2}, {2, 4}});

  const SpectrumComparison same = compare_spectra(a, a, 1e-10);
  CHECK(same.passed);
  CHECK(same.compared == 4);
  CHECK(same.max_relative_deviation == 0.0);

  const Spectrum shifted = hand_spectrum({1, 1, 2, 2.00001}, {{0, 2}, {2, 4}});
  const SpectrumComparison off = compare_spectra(a, shifted, 1e-8);
  CHECK_FALSE(off.passed);
  CHECK(off.conclusive);
  CHECK(off.max_relative_deviation > 1e-7);
  CHECK_FALSE(off.detail.empty());

  const Spectrum split = hand_spectrum({1, 1, 2, 2}, {{0, 1}, {1, 2}, {2, 4}});
  const SpectrumComparison misaligned = compare_spectra(a, split, 1e-8);
  CHECK_FALSE(misaligned.passed);
  CHECK_FALSE(misaligned.aligned);

  Spectrum fuzzy = a;
  fuzzy.residuals.setConstant(1e-5);
  const SpectrumComparison inconclusive = compare_spectra(a, fuzzy, 1e-8);
  CHECK_FALSE(inconclusive.passed);
  CHECK_FALSE(inconclusive.conclusive);

  const SpectrumComparison empty = compare_spectra(Spectrum{}, Spectrum{}, 1e-8);
  CHECK_FALSE(empty.passed);
  CHECK_FALSE(empty.conclusive);
  CHECK(empty.compared == 0);
}

TEST_CASE("operators without weighted symmetry are refused") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 8);
  try {
    compute_spectrum(c, assemble_d(c), 6);
    FAIL("the exterior derivative is not symmetric; it must be refused");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(std::string(e.what()).find("refusing to diagonalize") != std::string::npos);
  }
}

TEST_CASE("the non-symmetric solver reproduces a symmetric spectrum") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 8);
  const GradedMatrix dirac = assemble_dirac(c, DiracVariant::Basic);
  const Spectrum sym = compute_spectrum(c, dirac, 8);
  const VecC gen = nonsymmetric_spectrum(c, dirac, 8);
  REQUIRE(gen.size() == 8);
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(std::abs(gen(i).imag()) < 1e-8);
    CHECK(std::abs(gen(i)) ==
          doctest::Approx(std::abs(sym.eigenvalues(i))).epsilon(1e-8));
  }
}

TEST_CASE("kernel counts across the differential family") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 10);
  BettiDiagnostics diag;
  CHECK(betti_numbers(c, DifferentialKind::Plain, &diag) == std::vector<int>{1, 1, 0});
  CHECK(diag.threshold_stable);
  REQUIRE(diag.kernel_gap.size() == 3);
  for (double g : diag.kernel_gap) CHECK(g > 1e-3);

  CHECK(betti_numbers(c, DifferentialKind::TwistedDuality) == std::vector<int>{0, 1, 1});
  CHECK(betti_numbers(c, DifferentialKind::MetricTwisted) == std::vector<int>{0, 0, 0});

  const ReducedBasicComplex hopf = build_hopf_de_rham_model(6);
  CHECK(betti_numbers(hopf, DifferentialKind::Plain) == std::vector<int>{1, 0, 1});

  const ReducedBasicComplex torus = build_torus_base_model(1.0, 1.0, std::nullopt, 5);
  CHECK(betti_numbers(torus, DifferentialKind::Plain) == std::vector<int>{1, 2, 1});

  const ReducedBasicComplex fib =
      build_circle_fibration_model(1.0, WeightLiteral::parse("fourier:0,0.4"), 10);
  CHECK(betti_numbers(fib, DifferentialKind::Plain) == std::vector<int>{1, 1});
}

TEST_CASE("Betti computation needs the de Rham module") {
  const ReducedBasicComplex spinor = build_hopf_spinor_model(0.5, 6);
  CHECK_THROWS_AS(betti_numbers(spinor, DifferentialKind::Plain), Error);
  try {
    betti_numbers(spinor, DifferentialKind::Plain);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedModel);
  }
}

TEST_CASE("twisted-duality Laplacian kernel matches its kernel counts") {
  const ReducedBasicComplex c = build_carriere_model(kStandardMonodromy, 10);
  const Spectrum s = compute_spectrum(c, laplacian_for(c, DifferentialKind::TwistedDuality), 6);
  REQUIRE(s.eigenvalues.size() >= 3);
  CHECK(s.eigenvalues(0) > -1e-8);
  CHECK(std::abs(s.eigenvalues(0)) < 1e-8);
  CHECK(std::abs(s.eigenvalues(1)) < 1e-8);
  CHECK(s.eigenvalues(2) > 1e-2);
}
