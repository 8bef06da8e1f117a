#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

namespace exhol {

/// Enumeration of all multi-indices over `nvars` variables with total degree
/// <= `order`, in graded lexicographic order, plus the lookup structures that
/// make dense truncated-series arithmetic cheap: a product table (all index
/// pairs whose degrees sum within the truncation) and per-variable shift maps
/// for differentiation/integration.
class MultiIndexTable {
 public:
  struct ProductEntry {
    std::uint32_t lhs, rhs, out;
  };

  MultiIndexTable(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(indices_.size()); }

  const std::vector<int>& index_at(int pos) const { return indices_[pos]; }
  int degree_at(int pos) const { return degrees_[pos]; }

  /// Position of a multi-index, or -1 if its total degree exceeds the order.
  int position(const std::vector<int>& mi) const;

  /// First position of the given total degree (positions are grouped by degree).
  int degree_begin(int degree) const { return degree_begin_[degree]; }
  int degree_end(int degree) const { return degree_begin_[degree + 1]; }

  const std::vector<ProductEntry>& products() const { return products_; }

  /// shift_up(pos, v): position of mi + e_v, or -1 when that exceeds the order.
  int shift_up(int pos, int var) const { return shift_up_[pos * nvars_ + var]; }
  /// shift_down(pos, v): position of mi - e_v, or -1 when mi[v] == 0.
  int shift_down(int pos, int var) const { return shift_down_[pos * nvars_ + var]; }

  /// Shared cache keyed by (nvars, order).
  static std::shared_ptr<const MultiIndexTable> get(int nvars, int order);

 private:
  int nvars_, order_;
  std::vector<std::vector<int>> indices_;
  std::vector<int> degrees_;
  std::vector<int> degree_begin_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<ProductEntry> products_;
  std::vector<int> shift_up_, shift_down_;

  std::uint64_t key_of(const std::vector<int>& mi) const;
};

using TablePtr = std::shared_ptr<const MultiIndexTable>;

}  // namespace exhol
