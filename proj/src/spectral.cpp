#include "folspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "folspec/tolerances.hpp"

namespace folspec {

namespace {

// Sort order for real spectra: by modulus, negative branch first on ties.
std::vector<Eigen::Index> modulus_order(const Vec& ev) {
  std::vector<Eigen::Index> idx(std::size_t(ev.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (ma != mb) return ma < mb;
    return ev(a) < ev(b);
  });
  return idx;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(const Vec& sorted) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  const Eigen::Index n = sorted.size();
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const bool split =
        i == n || std::abs(sorted(i) - sorted(i - 1)) >
                      tol::cluster * std::max(1.0, std::abs(sorted(i)));
    if (split) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

// The modulus sort leaves the order inside a near-degenerate band at the
// mercy of rounding: a +/- pair lands in whatever order the solver emitted.
// Canonicalize each band (negative branch first, then ascending) so that
// repeated runs and deformed models order their spectra identically.
void canonical_band_order(Vec& vals, Mat& vecs) {
  const Eigen::Index n = vals.size();
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const bool split =
        i == n || std::abs(std::abs(vals(i)) - std::abs(vals(i - 1))) >
                      tol::cluster * std::max(1.0, std::abs(vals(i)));
    if (!split) continue;
    std::vector<Eigen::Index> idx(std::size_t(i - begin));
    std::iota(idx.begin(), idx.end(), begin);
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return vals(a) < vals(b); });
    Vec band_vals(i - begin);
    Mat band_vecs(vecs.rows(), i - begin);
    for (Eigen::Index j = 0; j < i - begin; ++j) {
      band_vals(j) = vals(idx[std::size_t(j)]);
      band_vecs.col(j) = vecs.col(idx[std::size_t(j)]);
    }
    vals.segment(begin, i - begin) = band_vals;
    vecs.middleCols(begin, i - begin) = band_vecs;
    begin = i;
  }
}

// Package sorted eigenpairs: keep `count` lowest, extended to the end of any
// cluster the cut lands in, with residuals against the whitened matrix.
Spectrum finish_spectrum(Vec sorted_vals, Mat sorted_vecs, const Mat& B, int count,
                         bool iterative) {
  canonical_band_order(sorted_vals, sorted_vecs);
  const Eigen::Index n = sorted_vals.size();
  const auto ranges = cluster_ranges(sorted_vals);
  Eigen::Index want = count <= 0 ? n : std::min<Eigen::Index>(count, n);
  for (const auto& r : ranges)
    if (r.first < want && want < r.second) want = r.second;

  Spectrum s;
  s.dimension = B.rows();
  s.iterative = iterative;
  s.eigenvalues = sorted_vals.head(want);
  s.residuals = Vec::Zero(want);
  const double scale =
      std::max(1.0, n > 0 ? sorted_vals.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < want; ++i)
    s.residuals(i) =
        (B * sorted_vecs.col(i) - sorted_vals(i) * sorted_vecs.col(i)).norm() / scale;
  for (const auto& r : ranges)
    if (r.second <= want) s.clusters.push_back(r);
  return s;
}

}  // namespace

Spectrum lowest_eigenvalues_dense(const Mat& sym, int count) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "dense symmetric eigensolver did not converge");
  const auto order = modulus_order(es.eigenvalues());
  const Eigen::Index n = sym.rows();
  Vec vals(n);
  Mat vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vals(i) = es.eigenvalues()(order[std::size_t(i)]);
    vecs.col(i) = es.eigenvectors().col(order[std::size_t(i)]);
  }
  return finish_spectrum(vals, vecs, sym, count, false);
}

Spectrum lowest_eigenvalues_lanczos(const Mat& sym, int count) {
  const Eigen::Index n = sym.rows();
  const int want = count <= 0 ? int(n) : count;
  if (n <= 2 * Eigen::Index(want) + 40) return lowest_eigenvalues_dense(sym, count);

  const double scale = std::max(1.0, sym.cwiseAbs().rowwise().sum().maxCoeff());
  // Slightly off zero so kernels stay invertible after the shift; the solve
  // magnifies exactly the modes the caller wants.
  const double sigma = -6.17e-3 * scale;
  Eigen::PartialPivLU<Mat> lu(sym - sigma * Mat::Identity(n, n));

  const Eigen::Index steps = std::min<Eigen::Index>(n, std::max(2 * want + 40, 80));
  Mat V(n, steps);
  Vec alpha = Vec::Zero(steps), beta = Vec::Zero(steps);
  Rng rng(0x5eedf01d);
  Vec v = rng.vector(n).normalized();
  Vec prev = Vec::Zero(n);
  double b_prev = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < steps; ++j) {
    V.col(j) = v;
    Vec w = lu.solve(v);
    alpha(j) = v.dot(w);
    w -= alpha(j) * v + b_prev * prev;
    w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    k = j + 1;
    const double b = w.norm();
    if (b < 1e-13) break;
    beta(j) = b;
    prev = v;
    v = w / b;
    b_prev = b;
  }

  Mat t = Mat::Zero(k, k);
  t.diagonal() = alpha.head(k);
  if (k > 1) {
    t.diagonal(1) = beta.head(k - 1);
    t.diagonal(-1) = beta.head(k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(t);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "Lanczos tridiagonal eigensolver did not converge");

  Vec lam(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double theta = es.eigenvalues()(i);
    lam(i) = std::abs(theta) > 1e-14 ? sigma + 1.0 / theta
                                     : std::numeric_limits<double>::infinity();
  }
  Mat ritz = V.leftCols(k) * es.eigenvectors();
  const auto order = modulus_order(lam);
  Vec vals(k);
  Mat vecs(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    vals(i) = lam(order[std::size_t(i)]);
    vecs.col(i) = ritz.col(order[std::size_t(i)]).normalized();
  }
  // Only the requested slice is converged; drop the exploratory tail.
  const Eigen::Index keep = std::min<Eigen::Index>(k, want + 8);
  return finish_spectrum(vals.head(keep), vecs.leftCols(keep), sym, want, true);
}

namespace {

Mat whitened_matrix(const ReducedBasicComplex& c, const GradedMatrix& op,
                    bool require_symmetric) {
  if (op.total_in() != op.total_out())
    fail(ErrorKind::Internal, "spectrum requested for a non-square operator");
  const auto dims = c.sector_dims();
  Eigen::Index total = 0;
  for (auto d : dims) total += d;
  if (op.total_in() != total)
    fail(ErrorKind::Internal,
         "operator '" + op.name + "' does not match the complex dimensions");
  if (total > 20000)
    fail(ErrorKind::Numerical, "operator too large to diagonalize");

  Mat ga = Mat::Zero(total, total);
  {
    const Mat a = op.dense();
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      ga.middleRows(row, dims[k]) =
          gram_matrix(c, int(k)) * a.middleRows(row, dims[k]);
      row += dims[k];
    }
  }
  if (require_symmetric) {
    const double defect = (ga - ga.transpose()).norm();
    if (defect > tol::symmetry * std::max(1.0, ga.norm()))
      fail(ErrorKind::Numerical,
           "operator '" + op.name +
               "' is not symmetric for the weighted inner product; refusing to "
               "diagonalize it as if it were");
  }
  const Mat cb = orthonormal_change_of_basis(c).dense();
  return cb.transpose() * ga * cb;
}

}  // namespace

Spectrum compute_spectrum(const ReducedBasicComplex& c, const GradedMatrix& op,
                          int count) {
  const Mat b = whitened_matrix(c, op, true);
  Spectrum s = b.rows() > tol::dense_limit ? lowest_eigenvalues_lanczos(b, count)
                                           : lowest_eigenvalues_dense(b, count);
  s.operator_name = op.name;
  s.truncation = c.descriptor.truncation;
  return s;
}

VecC nonsymmetric_spectrum(const ReducedBasicComplex& c, const GradedMatrix& op,
                           int count) {
  const Mat b = whitened_matrix(c, op, false);
  Eigen::EigenSolver<Mat> es(b);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::Numerical, "non-symmetric eigensolver did not converge");
  VecC ev = es.eigenvalues();
  std::vector<Eigen::Index> idx(std::size_t(ev.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index bb) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(bb));
    if (ma != mb) return ma < mb;
    if (ev(a).real() != ev(bb).real()) return ev(a).real() < ev(bb).real();
    return ev(a).imag() < ev(bb).imag();
  });
  const Eigen::Index want =
      count <= 0 ? ev.size() : std::min<Eigen::Index>(count, ev.size());
  VecC out(want);
  for (Eigen::Index i = 0; i < want; ++i) out(i) = ev(idx[std::size_t(i)]);
  return out;
}

SpectrumComparison compare_spectra(const Spectrum& a, const Spectrum& b,
                                   double rel_tol) {
  SpectrumComparison out;
  const Eigen::Index m = std::min(a.eigenvalues.size(), b.eigenvalues.size());
  out.compared = m;
  if (m == 0) {
    out.conclusive = false;
    out.detail = "nothing to compare";
    return out;
  }

  const double gate = rel_tol / 10.0;
  double worst_res = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    worst_res = std::max({worst_res, a.residuals(i), b.residuals(i)});
  if (worst_res > gate) {
    out.conclusive = false;
    out.detail = "eigenvalue residuals reach " + std::to_string(worst_res) +
                 ", too large to resolve a relative tolerance of " +
                 std::to_string(rel_tol);
  }

  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = std::abs(a.eigenvalues(i) - b.eigenvalues(i)) /
                     std::max({1.0, std::abs(a.eigenvalues(i)),
                               std::abs(b.eigenvalues(i))});
    if (d > out.max_relative_deviation) out.max_relative_deviation = d;
    if (d > rel_tol && out.detail.empty())
      out.detail = "eigenvalue " + std::to_string(i) + " differs: " +
                   std::to_string(a.eigenvalues(i)) + " vs " +
                   std::to_string(b.eigenvalues(i));
  }

  std::vector<Eigen::Index> mult_a, mult_b;
  for (const auto& r : a.clusters)
    if (r.second <= m) mult_a.push_back(r.second - r.first);
  for (const auto& r : b.clusters)
    if (r.second <= m) mult_b.push_back(r.second - r.first);
  const std::size_t common = std::min(mult_a.size(), mult_b.size());
  for (std::size_t i = 0; i < common; ++i)
    if (mult_a[i] != mult_b[i]) {
      out.aligned = false;
      if (out.detail.empty())
        out.detail = "cluster multiplicities differ over the compared range";
      break;
    }

  out.passed = out.conclusive && out.aligned &&
               out.max_relative_deviation <= rel_tol;
  return out;
}

std::string differential_name(DifferentialKind kind) {
  switch (kind) {
    case DifferentialKind::Plain:
      return "d";
    case DifferentialKind::TwistedDuality:
      return "d-minus-kappa";
    case DifferentialKind::MetricTwisted:
      return "d-tilde";
  }
  return "?";
}

GradedMatrix laplacian_for(const ReducedBasicComplex& c, DifferentialKind kind) {
  switch (kind) {
    case DifferentialKind::Plain:
      return assemble_laplacian(c, LaplacianVariant::Basic);
    case DifferentialKind::MetricTwisted:
      return assemble_laplacian(c, LaplacianVariant::Twisted);
    case DifferentialKind::TwistedDuality:
      break;
  }
  const GradedMatrix a = assemble_twisted_duality_differential(c);
  GradedMatrix adj = GradedMatrix::square(c.sector_dims());
  for (const auto& [key, blk] : a.blocks()) {
    const auto [in, out] = key;
    Eigen::LLT<Mat> llt(gram_matrix(c, in));
    adj.set_block(out, in, llt.solve(blk.transpose() * gram_matrix(c, out)));
  }
  GradedMatrix l = adj.compose(a) + a.compose(adj);
  l.name = "laplacian-" + differential_name(kind);
  l.symmetric_wrt_weight = true;
  l.aliasing_tail = a.aliasing_tail;
  return l;
}

std::vector<int> betti_numbers(const ReducedBasicComplex& c, DifferentialKind kind,
                               BettiDiagnostics* diag) {
  if (!c.is_de_rham())
    fail(ErrorKind::UnsupportedModel, "Betti numbers need the de Rham module");
  const GradedMatrix l = laplacian_for(c, kind);
  const GradedMatrix cb = orthonormal_change_of_basis(c);

  std::vector<Vec> eigs;
  double lam_max = 0.0;
  for (int k = 0; k <= c.codimension; ++k) {
    const Mat ck = cb.block(k, k);
    const Mat bk = ck.transpose() * gram_matrix(c, k) * l.block(k, k) * ck;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (bk + bk.transpose()),
                                          Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      fail(ErrorKind::Numerical, "Laplacian eigensolver did not converge");
    eigs.push_back(es.eigenvalues());
    lam_max = std::max(lam_max, es.eigenvalues().cwiseAbs().maxCoeff());
  }

  const double thresh = tol::kernel * std::max(1.0, lam_max);
  std::vector<int> betti;
  bool stable = true;
  std::vector<double> gaps;
  for (const Vec& ev : eigs) {
    int n0 = 0, n0_loose = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < thresh) ++n0;
      if (ev(i) < 10.0 * thresh) ++n0_loose;
      if (ev(i) >= thresh) gap = std::min(gap, ev(i));
    }
    betti.push_back(n0);
    stable = stable && n0 == n0_loose;
    gaps.push_back(gap);
  }
  if (diag) {
    diag->threshold = thresh;
    diag->threshold_stable = stable;
    diag->kernel_gap = gaps;
  }
  return betti;
}

}  // namespace folspec
