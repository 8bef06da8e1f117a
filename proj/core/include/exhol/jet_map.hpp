#pragma once

#include <vector>

#include "exhol/jet.hpp"

namespace exhol {

/// A list of jets sharing one base point and table: a truncated Taylor map
/// from R^n (the jets' variables) to R^m (one component per jet).
class JetMap {
 public:
  JetMap() = default;
  explicit JetMap(std::vector<JetSeries> components);

  int input_dim() const { return components_.empty() ? 0 : components_[0].nvars(); }
  int output_dim() const { return static_cast<int>(components_.size()); }
  const JetSeries& component(int i) const { return components_[i]; }
  const std::vector<JetSeries>& components() const { return components_; }

  /// Output point: the components' constant terms.
  std::vector<double> value() const;

 private:
  std::vector<JetSeries> components_;
};

/// f after g: substitute the components of g for the variables of f.
/// Requires g.value() == f's base point (within 1e-9).
JetSeries jet_compose(const JetSeries& f, const JetMap& g);
JetMap jet_compose(const JetMap& f, const JetMap& g);

/// Truncated inverse of a square jet map with nonsingular Jacobian at the
/// base point: returns g with g(f(x)) = x through the truncation order.
JetMap jet_map_inverse(const JetMap& f);

/// Identity map on `table`'s variables about `base`.
JetMap jet_map_identity(const TablePtr& table, const std::vector<double>& base);

}  // namespace exhol
