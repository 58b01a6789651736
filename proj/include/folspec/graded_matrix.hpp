#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folspec/types.hpp"

namespace folspec {

/// An operator between graded spaces, stored block-wise.  A block keyed
/// (in, out) maps the degree-`in` sector of the source grading to the
/// degree-`out` sector of the target grading.  Absent blocks are zero.
///
/// Scalar is double for everything except the signature involution, which
/// needs the complexified sectors.
template <typename Scalar>
class GradedMatrixT {
public:
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Key = std::pair<int, int>;  // (degree_in, degree_out)

  GradedMatrixT() = default;
  GradedMatrixT(std::vector<Eigen::Index> dims_in, std::vector<Eigen::Index> dims_out)
      : dims_in_(std::move(dims_in)), dims_out_(std::move(dims_out)) {}

  static GradedMatrixT square(std::vector<Eigen::Index> dims) {
    return GradedMatrixT(dims, dims);
  }

  int sectors_in() const { return int(dims_in_.size()); }
  int sectors_out() const { return int(dims_out_.size()); }
  Eigen::Index dim_in(int k) const { return dims_in_.at(size_t(k)); }
  Eigen::Index dim_out(int k) const { return dims_out_.at(size_t(k)); }
  Eigen::Index total_in() const {
    Eigen::Index n = 0;
    for (auto d : dims_in_) n += d;
    return n;
  }
  Eigen::Index total_out() const {
    Eigen::Index n = 0;
    for (auto d : dims_out_) n += d;
    return n;
  }

  const std::map<Key, Block>& blocks() const { return blocks_; }

  bool has_block(int in, int out) const { return blocks_.count({in, out}) > 0; }

  /// Zero block of the right shape if absent.
  Block block(int in, int out) const {
    auto it = blocks_.find({in, out});
    if (it != blocks_.end()) return it->second;
    return Block::Zero(dim_out(out), dim_in(in));
  }

  void set_block(int in, int out, Block b) {
    if (b.rows() != dim_out(out) || b.cols() != dim_in(in))
      fail(ErrorKind::Internal, "graded block shape mismatch at (" +
                                    std::to_string(in) + "," + std::to_string(out) + ")");
    if (b.size() == 0 || b.template lpNorm<Eigen::Infinity>() == Scalar(0)) {
      blocks_.erase({in, out});
      return;
    }
    blocks_[{in, out}] = std::move(b);
  }

  /// Offset of sector k inside the concatenated source/target vector.
  Eigen::Index offset_in(int k) const {
    Eigen::Index n = 0;
    for (int j = 0; j < k; ++j) n += dim_in(j);
    return n;
  }
  Eigen::Index offset_out(int k) const {
    Eigen::Index n = 0;
    for (int j = 0; j < k; ++j) n += dim_out(j);
    return n;
  }

  /// Full matrix on the concatenated graded vector.
  Block dense() const {
    Block m = Block::Zero(total_out(), total_in());
    for (const auto& [key, b] : blocks_)
      m.block(offset_out(key.second), offset_in(key.first), b.rows(), b.cols()) = b;
    return m;
  }

  GradedMatrixT operator+(const GradedMatrixT& rhs) const {
    GradedMatrixT r = *this;
    for (const auto& [key, b] : rhs.blocks_)
      r.set_block(key.first, key.second, r.block(key.first, key.second) + b);
    r.name = name.empty() ? rhs.name : name;
    return r;
  }

  GradedMatrixT operator-(const GradedMatrixT& rhs) const {
    return *this + (rhs * Scalar(-1));
  }

  GradedMatrixT operator*(Scalar s) const {
    GradedMatrixT r = *this;
    for (auto& [key, b] : r.blocks_) b *= s;
    return r;
  }

  /// Composition this∘rhs (apply rhs, then this).
  GradedMatrixT compose(const GradedMatrixT& rhs) const {
    GradedMatrixT r(rhs.dims_in_, dims_out_);
    for (const auto& [krhs, brhs] : rhs.blocks_) {
      for (const auto& [klhs, blhs] : blocks_) {
        if (klhs.first != krhs.second) continue;
        Key key{krhs.first, klhs.second};
        Block add = blhs * brhs;
        if (r.has_block(key.first, key.second))
          r.set_block(key.first, key.second, r.block(key.first, key.second) + add);
        else
          r.set_block(key.first, key.second, std::move(add));
      }
    }
    return r;
  }

  /// Restriction to selected source sectors mapped into selected target
  /// sectors (used for the even -> odd half of the Dirac operator).
  Block restricted(const std::vector<int>& in_sectors,
                   const std::vector<int>& out_sectors) const {
    Eigen::Index ni = 0, no = 0;
    for (int k : in_sectors) ni += dim_in(k);
    for (int k : out_sectors) no += dim_out(k);
    Block m = Block::Zero(no, ni);
    Eigen::Index ci = 0;
    for (int ki : in_sectors) {
      Eigen::Index co = 0;
      for (int ko : out_sectors) {
        m.block(co, ci, dim_out(ko), dim_in(ki)) = block(ki, ko);
        co += dim_out(ko);
      }
      ci += dim_in(ki);
    }
    return m;
  }

  double norm() const { return op_norm(dense()); }

  GradedMatrixT<cplx> complexified() const {
    GradedMatrixT<cplx> r(dims_in_, dims_out_);
    for (const auto& [key, b] : blocks_)
      r.set_block(key.first, key.second, b.template cast<cplx>());
    r.name = name;
    r.symmetric_wrt_weight = symmetric_wrt_weight;
    r.aliasing_tail = aliasing_tail;
    return r;
  }

  std::string name;
  /// Set when the operator is self-adjoint for the weighted inner product of
  /// its complex; validated where it is claimed.
  bool symmetric_wrt_weight = false;
  /// Largest relative norm dropped when a coefficient product overflowed the
  /// truncation during assembly (0 for structurally exact operators).
  double aliasing_tail = 0.0;

private:
  std::vector<Eigen::Index> dims_in_, dims_out_;
  std::map<Key, Block> blocks_;
};

using GradedMatrix = GradedMatrixT<double>;
using GradedMatrixC = GradedMatrixT<cplx>;

template <typename Scalar>
GradedMatrixT<Scalar> operator*(Scalar s, const GradedMatrixT<Scalar>& m) {
  return m * s;
}

}  // namespace folspec
