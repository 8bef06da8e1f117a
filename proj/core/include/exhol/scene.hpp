#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exhol/expr.hpp"
#include "exhol/metric.hpp"

namespace exhol {

/// A parsed scene: bulk metric expressions in x0..x{d-1}, an embedding in
/// u0..u{d-k-1}, optional orthonormal-frame seeds, a base parameter point,
/// an optional conformal factor, and the jet truncation order.
struct Scene {
  int d = 0;
  int k = 0;
  int jet_order = 6;
  std::vector<std::vector<ExprAst>> metric;       // d x d, variables x
  std::vector<ExprAst> embedding;                 // d entries, variables u
  std::vector<std::vector<ExprAst>> frame_seeds;  // k rows of d entries, variables u; may be empty
  std::vector<double> base_u;                     // d-k entries
  std::optional<ExprAst> conformal_factor;        // variables x

  int lambda_dim() const { return d - k; }

  static Scene from_json_text(const std::string& text, int jet_order_override = 0);
  static Scene from_json_file(const std::string& path, int jet_order_override = 0);

  TablePtr x_table() const { return MultiIndexTable::get(d, jet_order); }
  TablePtr u_table() const { return MultiIndexTable::get(d - k, jet_order); }
  /// Table over tubular coordinates (u_1..u_{d-k}, t_1..t_k).
  TablePtr ut_table() const { return MultiIndexTable::get(d, jet_order); }

  /// Embedding point x0 = iota(u0).
  std::vector<double> base_x() const;

  /// Embedding components as u-jets about base_u.
  std::vector<JetSeries> embedding_jets() const;

  /// Bulk metric jets about base_x. With `conformally_rescaled`, returns the
  /// jets of Omega^2 g instead (requires a conformal_factor).
  MetricJet metric_jet(bool conformally_rescaled = false) const;

  /// Omega as an x-jet about base_x (requires a conformal_factor).
  JetSeries conformal_factor_jet() const;

  /// Scale tags used in reports and density bookkeeping.
  std::string scale_tag(bool conformally_rescaled = false) const {
    return conformally_rescaled ? "omega2_g" : "g";
  }
};

}  // namespace exhol
