#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace folspec {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Error taxonomy.  Every throwing path in the library uses one of these so
/// the CLI can map failures onto its exit-code contract.
enum class ErrorKind {
  ModelDefinition,   // bad model data: sign fixing failed, d^2 != 0, ...
  UnsupportedModel,  // operation not defined for this complex (q odd, spinor, ...)
  Schema,            // descriptor / config / report schema violation
  Numerical,         // eigensolver breakdown, ill-conditioned Gram, ...
  Usage,             // bad CLI invocation
  Internal           // invariant the library itself must maintain was violated
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Spectral (2-)norm of a dense matrix.  Matrices here are small enough that
/// an SVD is affordable and removes any doubt a power-iteration bound leaves.
inline double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::BDCSVD<Mat>(a).singularValues()(0);
}

inline double op_norm(const MatC& a) {
  if (a.size() == 0) return 0.0;
  // Hermitian eigensolve of the smaller Gram matrix; BDCSVD's complex path
  // is not worth trusting across Eigen point releases.
  MatC g = a.rows() <= a.cols() ? MatC(a * a.adjoint()) : MatC(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<MatC> es(g, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

/// Deterministic xorshift-based generator for property-style tests and
/// residual probes; avoids platform differences in std distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return s_;
  }
  /// uniform in [-1, 1]
  double uniform() {
    return 2.0 * double(next() >> 11) / double(1ull << 53) - 1.0;
  }
  Vec vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform();
    return v;
  }

private:
  std::uint64_t s_;
};

}  // namespace folspec
