#pragma once

#include <vector>

#include "exhol/expr.hpp"
#include "exhol/tensor.hpp"

namespace exhol {

/// Square matrix of jets with its inverse, the common carrier for bulk
/// metrics, induced metrics, and tubular-coordinate metrics.
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int dim, const JetSeries& proto);

  int dim() const { return dim_; }
  const JetSeries& at(int i, int j) const { return m_[static_cast<std::size_t>(i) * dim_ + j]; }
  JetSeries& at(int i, int j) { return m_[static_cast<std::size_t>(i) * dim_ + j]; }

  JetMatrix inverse() const;  // Gauss-Jordan in the jet ring
  JetSeries determinant() const;

 private:
  int dim_ = 0;
  std::vector<JetSeries> m_;
};

/// Bulk metric (and inverse) as jets about a base point.
struct MetricJet {
  int dim = 0;
  JetMatrix g;
  JetMatrix ginv;

  const TablePtr& table() const { return g.at(0, 0).table(); }
  const std::vector<double>& base() const { return g.at(0, 0).base_point(); }

  /// Validates symmetry and positive definiteness at the base point and
  /// computes the inverse.
  static MetricJet from_components(JetMatrix components);

  /// Evaluate metric expressions at `base` to the table's order.
  static MetricJet from_expressions(const std::vector<std::vector<ExprAst>>& comps,
                                    const std::vector<double>& base, const TablePtr& table);
};

/// Christoffel symbols Gamma^a_{bc}, flattened [a][b][c] row-major.
std::vector<JetSeries> christoffel(const MetricJet& m);

inline const JetSeries& gamma_at(const std::vector<JetSeries>& gamma, int dim, int a, int b, int c) {
  return gamma[(static_cast<std::size_t>(a) * dim + b) * dim + c];
}

/// Covariant derivative of a tensor with bulk indices only; the new lower
/// bulk index is prepended (slot 0).
Tensor covariant_derivative(const Tensor& t, const std::vector<JetSeries>& gamma, int dim);

}  // namespace exhol
