#pragma once

#include <initializer_list>
#include <vector>

#include "exhol/jet.hpp"

namespace exhol {

/// Index kinds: bulk coordinate indices (dimension d), tangential submanifold
/// indices (d-k), normal-frame indices (k, Greek in the usual conventions),
/// and tractor slots (d+2). Normal-frame indices contract by plain summation
/// regardless of variance; every other kind pairs one up with one down index.
enum class IndexKind { bulk, tangent, normal, tractor };

struct IndexSpec {
  IndexKind kind;
  bool up;
  int dim;
  friend bool operator==(const IndexSpec& a, const IndexSpec& b) {
    return a.kind == b.kind && a.up == b.up && a.dim == b.dim;
  }
};

/// Dense tensor with JetSeries entries, row-major storage, and an integer
/// conformal weight tag (0 when not meaningful).
class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled tensor; `proto` supplies the jet context for the entries.
  Tensor(std::vector<IndexSpec> shape, const JetSeries& proto);
  static Tensor scalar(const JetSeries& v);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<IndexSpec>& shape() const { return shape_; }
  const IndexSpec& spec(int i) const { return shape_[i]; }
  int dim(int i) const { return shape_[i].dim; }
  int weight() const { return weight_; }
  void set_weight(int w) { weight_ = w; }

  std::size_t size() const { return data_.size(); }
  const JetSeries& entry_flat(std::size_t i) const { return data_[i]; }
  JetSeries& entry_flat(std::size_t i) { return data_[i]; }

  const JetSeries& at(const std::vector<int>& idx) const { return data_[offset(idx)]; }
  JetSeries& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
  const JetSeries& at(std::initializer_list<int> idx) const {
    return at(std::vector<int>(idx));
  }
  JetSeries& at(std::initializer_list<int> idx) { return at(std::vector<int>(idx)); }

  double value_at(const std::vector<int>& idx) const { return at(idx).value(); }

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator-(const Tensor& a);
  Tensor scaled(double s) const;
  Tensor scaled(const JetSeries& s) const;

  /// Tensor product; the result's shape is a's shape followed by b's.
  friend Tensor outer(const Tensor& a, const Tensor& b);

  /// Contract index positions p and q (same kind; up against down except for
  /// normal-frame indices, which sum plainly).
  Tensor contracted(int p, int q) const;

  /// Result whose i-th index is this tensor's perm[i]-th index.
  Tensor permuted(const std::vector<int>& perm) const;

  /// Unit-normalized (anti)symmetrization over the listed positions, which
  /// must share an index spec.
  Tensor symmetrized(const std::vector<int>& positions) const;
  Tensor antisymmetrized(const std::vector<int>& positions) const;

  double max_abs() const;

  std::size_t offset(const std::vector<int>& idx) const;
  std::vector<int> unravel(std::size_t flat) const;

  const JetSeries& proto() const { return data_[0]; }

 private:
  std::vector<IndexSpec> shape_;
  std::vector<JetSeries> data_;
  int weight_ = 0;
};

/// All tuples (i_1 <= ... <= i_m) over {0..dim-1}: the index set of a fully
/// symmetric slot group, with ranking and orbit multiplicities.
class SymTuples {
 public:
  SymTuples(int dim, int length);
  int dim() const { return dim_; }
  int length() const { return length_; }
  int count() const { return static_cast<int>(tuples_.size()); }
  const std::vector<int>& tuple(int r) const { return tuples_[r]; }
  /// Rank of an arbitrary (unsorted) tuple.
  int rank(std::vector<int> t) const;
  /// Number of distinct arrangements of tuple r (multinomial coefficient).
  double multiplicity(int r) const { return mult_[r]; }

 private:
  int dim_, length_;
  std::vector<std::vector<int>> tuples_;
  std::vector<double> mult_;
};

}  // namespace exhol
