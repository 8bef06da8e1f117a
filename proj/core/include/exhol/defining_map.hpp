#pragma once

#include "exhol/tubular.hpp"

namespace exhol {

/// Order-by-order canonical defining map for a parallelized Riemannian
/// submanifold embedding: s_alpha carried in tubular coordinates (and, via
/// the inverted chart, as bulk jets), with the per-order obstruction
/// coefficients left after each correction.
struct DefiningMapState {
  std::shared_ptr<const FrameField> frame;
  std::shared_ptr<const TubularGeometry> tub;
  std::vector<JetSeries> s_hat;  // tubular representatives, initially t_alpha
  JetMap psi;                    // Phi^{-1}
  int corrected_to = 0;
  bool conformal = false;

  /// residuals[i-1]: the obstruction tensor left at order i after the order-i
  /// correction (u-jet entries along the submanifold).
  std::vector<Tensor> residuals;
  std::vector<UpdateMatrix> updates;
  std::vector<int> update_ranks;

  /// s_alpha as bulk x-jets about the scene base point.
  std::vector<JetSeries> bulk_s() const;
  /// Bulk-coordinate Gram matrix g^{ab} d_a s_alpha d_b s_beta, row-major.
  std::vector<JetSeries> bulk_gram(const MetricJet& bulk_metric) const;
};

/// Construct the initial aligned defining map: Phi(u,t) = iota + t n(u),
/// s_alpha = t_alpha(Phi^{-1}(x)). Requires jet order >= 2.
DefiningMapState build_initial(const Scene& scene, std::shared_ptr<const FrameField> frame);

/// Gram matrix of the current state in tubular coordinates, row-major k*k.
std::vector<JetSeries> gram_matrix(const DefiningMapState& state);

/// Apply the correction at exactly one order (no sequencing precondition).
void apply_single_order(DefiningMapState& state, int order);

/// Corrections from corrected_to+1 through `order`; order 1 realizes the
/// -1/4 combination through the measured update map, higher orders the
/// least-squares removal whose residual lands in the generalized window
/// representation.
void correct_to_order(DefiningMapState& state, int order);

/// Perturb the state by B_{alpha g1 g2 delta} t_delta s_g1 s_g2 (B constant,
/// symmetric in g1 g2): realizes an alternative extension of the first-order
/// correction off the submanifold.
void perturb_first_order_extension(DefiningMapState& state, const Tensor& B);

/// Max-norm difference along the submanifold between the extracted window
/// obstruction at order 2 and the closed-form expression
/// -beta_{c alpha (g1} beta^c_{g2) beta} - (1/3) R_{g1 (alpha beta) g2}.
double verify_F2_formula(const Scene& scene, const DefiningMapState& state);

/// The closed-form order-2 obstruction evaluated from extrinsic data and the
/// curvature stack (window-projected, value entries at the base point).
Tensor f2_closed_form(const Scene& scene, const FrameField& frame);

}  // namespace exhol
