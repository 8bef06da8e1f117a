#pragma once

#include "exhol/defining_map.hpp"
#include "exhol/identities.hpp"

namespace exhol {

/// Everything tractor computations need in one fixed metric representative.
struct ScaleContext {
  std::string tag;
  int d = 0;
  MetricJet metric;
  CurvatureStack curv;

  const TablePtr& tab() const { return metric.table(); }
  const std::vector<double>& base() const { return metric.base(); }
  JetSeries zero() const { return JetSeries::zero(tab(), base()); }
};

ScaleContext make_scale_context(const Scene& scene, bool conformally_rescaled = false);

/// Conformal density of weight w, represented in a scale.
struct Density {
  std::string scale;
  double weight = 0.0;
  JetSeries value;
};

/// Representative in the scale Omega^2 g: value' = Omega^w value.
Density density_to_scale(const Density& phi, const JetSeries& omega, const std::string& new_tag);

/// Dense weighted tractor tensor in a splitting: `n_tr` tractor slots, each
/// of dimension d+2 with layout (+, vector 1..d, -), followed by `n_bulk`
/// extra lower bulk indices accumulated by tractor-connection applications.
class TractorTensor {
 public:
  TractorTensor() = default;
  TractorTensor(const ScaleContext& ctx, int n_tractor, int n_bulk, double weight);

  int d = 0;
  int n_tractor = 0, n_bulk = 0;
  double weight = 0.0;
  std::string scale;
  std::vector<JetSeries> data;

  int slot_dim() const { return d + 2; }
  std::size_t size() const { return data.size(); }
  std::size_t offset(const std::vector<int>& idx) const;
  const JetSeries& at(const std::vector<int>& idx) const { return data[offset(idx)]; }
  JetSeries& at(const std::vector<int>& idx) { return data[offset(idx)]; }

  TractorTensor& operator+=(const TractorTensor& o);
  TractorTensor& operator-=(const TractorTensor& o);
  TractorTensor scaled(const JetSeries& s) const;
  TractorTensor scaled(double s) const;
  double max_abs() const;
};

/// Weight-w density as a rank-0 tractor tensor.
TractorTensor density_tractor(const ScaleContext& ctx, const JetSeries& value, double weight);

/// The canonical tractor X^A = (0, 0, 1), weight 1.
TractorTensor x_tractor(const ScaleContext& ctx);

/// The tractor metric as a rank-2 tensor (slots h_AB in the splitting).
TractorTensor tractor_metric(const ScaleContext& ctx);

/// h_AB entry as a jet (0, 1, or g_ab).
JetSeries h_entry(const ScaleContext& ctx, int A, int B);

/// Tractor-coupled Levi-Civita connection; the new lower bulk index is
/// prepended to the bulk block.
TractorTensor tractor_connection(const ScaleContext& ctx, const TractorTensor& t);

/// Thomas-D operator; the new tractor slot is prepended. Requires a pure
/// tractor tensor (no open bulk indices).
TractorTensor thomas_d(const ScaleContext& ctx, const TractorTensor& t);
/// D / (d + 2w - 2); rejects the excluded weight w = 1 - d/2.
TractorTensor hatted_thomas_d(const ScaleContext& ctx, const TractorTensor& t);

/// Contract tractor slots i and j of one tensor with the tractor metric.
TractorTensor contract_h(const ScaleContext& ctx, const TractorTensor& t, int i, int j);
/// Contract slot `slot` of t against a rank-1 tractor v (h-pairing).
TractorTensor contract_with(const ScaleContext& ctx, const TractorTensor& t, int slot,
                            const TractorTensor& v);

/// Components in the splitting of Omega^2 g (representatives included).
TractorTensor splitting_change(const ScaleContext& ctx, const TractorTensor& t,
                               const JetSeries& omega, const std::string& new_tag);

/// Scale tractors, conformal Gram matrix and derived submanifold tractors of
/// a defining tuple (bulk-jet representatives of the sigma_alpha).
struct ScaleTractorData {
  std::vector<TractorTensor> N;    // rank 1, weight 0
  std::vector<JetSeries> rho;      // -(1/d)(Delta s + J s)
  std::vector<JetSeries> gram;     // k*k conformal Gram, row-major
};
ScaleTractorData scale_tractors(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk);

struct SubmanifoldTractors {
  std::vector<TractorTensor> B;    // B^A_{alpha beta}, flattened k*k (antisym pair)
  std::vector<TractorTensor> P;    // P_{AB alpha} = hatted-D_A N_B, per alpha
  Tensor K;                        // K_{alpha beta}, scalar jets
};
SubmanifoldTractors submanifold_tractors(const ScaleContext& ctx,
                                         const std::vector<JetSeries>& s_bulk);

/// P_2 T = N_alpha . hatted-D (N_alpha . D T) evaluated along the
/// submanifold (entries composed with the embedding; the sigma-slot term
/// drops on the zero locus, which keeps the operator defined for every k).
/// T must have weight (2 + k - d)/2.
TractorTensor p2_operator(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk,
                          const FrameField& frame, const TractorTensor& t);

/// P_2^T f = N^{B1}_beta N^{B2}_beta hatted-D_{B1} hatted-D_{B2} f on the
/// submanifold, for a weight-(2+k-d)/2 density f.
JetSeries p2_top_operator(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk,
                          const FrameField& frame, const JetSeries& f_value);

/// Entries composed with the embedding (u-jets along the submanifold).
TractorTensor restrict_tractor(const TractorTensor& t, const FrameField& frame);

}  // namespace exhol
