#include "exhol/defining_map.hpp"

#include <stdexcept>

#include "exhol/identities.hpp"
#include "exhol/projectors.hpp"

namespace exhol {

std::vector<JetSeries> DefiningMapState::bulk_s() const {
  std::vector<JetSeries> out;
  out.reserve(s_hat.size());
  for (const auto& s : s_hat) out.push_back(jet_compose(s, psi));
  return out;
}

std::vector<JetSeries> DefiningMapState::bulk_gram(const MetricJet& bulk_metric) const {
  const int k = tub->k, d = tub->d;
  std::vector<JetSeries> s = bulk_s();
  std::vector<std::vector<JetSeries>> ds(static_cast<std::size_t>(k));
  for (int al = 0; al < k; ++al)
    for (int a = 0; a < d; ++a)
      ds[static_cast<std::size_t>(al)].push_back(s[static_cast<std::size_t>(al)].derivative(a));
  std::vector<JetSeries> gram(static_cast<std::size_t>(k) * k,
                              JetSeries::zero(bulk_metric.table(), bulk_metric.base()));
  for (int al = 0; al < k; ++al)
    for (int be = al; be < k; ++be) {
      JetSeries acc = JetSeries::zero(bulk_metric.table(), bulk_metric.base());
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          acc += jet_mul(bulk_metric.ginv.at(a, b),
                         jet_mul(ds[static_cast<std::size_t>(al)][static_cast<std::size_t>(a)],
                                 ds[static_cast<std::size_t>(be)][static_cast<std::size_t>(b)]));
      gram[static_cast<std::size_t>(al) * k + be] = acc;
      gram[static_cast<std::size_t>(be) * k + al] = acc;
    }
  return gram;
}

DefiningMapState build_initial(const Scene& scene, std::shared_ptr<const FrameField> frame) {
  if (scene.jet_order < 2)
    throw std::invalid_argument("build_initial: jet order >= 2 required");
  DefiningMapState st;
  st.frame = frame;
  st.tub = build_tubular(scene, frame);
  for (int al = 0; al < scene.k; ++al) st.s_hat.push_back(st.tub->t_var(al));
  st.psi = jet_map_inverse(st.tub->phi);
  st.corrected_to = 0;
  return st;
}

std::vector<JetSeries> gram_matrix(const DefiningMapState& state) {
  return tubular_gram(*state.tub, state.s_hat, state.conformal);
}

void apply_single_order(DefiningMapState& state, int order) {
  const TubularGeometry& tub = *state.tub;
  if (tub.tab->order() < order + 2)
    throw std::invalid_argument("defining map correction: jet order >= order + 2 required");
  ObstructionLayout olay(tub.k, order);
  CorrectionLayout clay(tub.k, order);

  Tensor F = extract_obstruction(tub, tubular_gram(tub, state.s_hat, state.conformal), order);
  UpdateMatrix U = probe_update_matrix(tub, state.s_hat, order, state.conformal);
  RemoveResult rr = remove_correctable(flatten_obstruction(F, olay), U);
  Tensor A = unflatten_correction(rr.A, clay, F.proto());
  state.s_hat = apply_correction(tub, state.s_hat, A);

  Tensor after = extract_obstruction(tub, tubular_gram(tub, state.s_hat, state.conformal), order);
  if (static_cast<int>(state.residuals.size()) < order) {
    state.residuals.resize(static_cast<std::size_t>(order), Tensor());
    state.updates.resize(static_cast<std::size_t>(order));
    state.update_ranks.resize(static_cast<std::size_t>(order), 0);
  }
  state.residuals[static_cast<std::size_t>(order - 1)] = after;
  state.updates[static_cast<std::size_t>(order - 1)] = U;
  state.update_ranks[static_cast<std::size_t>(order - 1)] = rr.rank;
}

void correct_to_order(DefiningMapState& state, int order) {
  if (state.corrected_to >= order) return;
  for (int m = state.corrected_to + 1; m <= order; ++m) apply_single_order(state, m);
  state.corrected_to = order;
}

void perturb_first_order_extension(DefiningMapState& state, const Tensor& B) {
  if (B.rank() != 4) throw std::invalid_argument("perturb_first_order_extension: rank-4 B");
  const TubularGeometry& tub = *state.tub;
  const int k = tub.k;
  for (int al = 0; al < k; ++al) {
    JetSeries acc = tub.zero();
    for (int g1 = 0; g1 < k; ++g1)
      for (int g2 = 0; g2 < k; ++g2)
        for (int de = 0; de < k; ++de) {
          double c = B.at({al, g1, g2, de}).value();
          if (c == 0.0) continue;
          JetSeries term = jet_mul(tub.t_var(de), jet_mul(state.s_hat[static_cast<std::size_t>(g1)],
                                                          state.s_hat[static_cast<std::size_t>(g2)]));
          acc += term * c;
        }
    state.s_hat[static_cast<std::size_t>(al)] += acc;
  }
}

Tensor f2_closed_form(const Scene& scene, const FrameField& frame) {
  const int k = frame.k;
  const int m = frame.lambda_dim();
  const bool rescaled = frame.scale != "g";
  CurvatureStack cs = curvature_stack(scene.metric_jet(rescaled));
  RestrictedCurvature rc = restrict_curvature(cs, frame);
  ExtrinsicData ex = extrinsic_data(frame);
  InducedGeometry ig = induced_geometry(frame);

  const IndexSpec nor{IndexKind::normal, false, k};
  Tensor R_nnnn = project_slots(rc.riemann, frame, {1, 1, 1, 1});

  Tensor F({nor, nor, nor, nor}, frame.zero_jet());
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be)
      for (int g1 = 0; g1 < k; ++g1)
        for (int g2 = 0; g2 < k; ++g2) {
          // -beta_{c alpha (g1} beta^c_{g2) beta}
          JetSeries bb = frame.zero_jet();
          for (int c = 0; c < m; ++c)
            for (int e = 0; e < m; ++e) {
              JetSeries up = ig.gbar_inv.at(c, e);
              bb += jet_mul(up, jet_mul(ex.beta.at({c, al, g1}), ex.beta.at({e, g2, be})));
              bb += jet_mul(up, jet_mul(ex.beta.at({c, al, g2}), ex.beta.at({e, g1, be})));
            }
          bb *= 0.5;
          // -(1/3) R_{g1 (alpha beta) g2}
          JetSeries rr =
              0.5 * (R_nnnn.at({g1, al, be, g2}) + R_nnnn.at({g1, be, al, g2}));
          F.at({al, be, g1, g2}) = -bb - rr * (1.0 / 3.0);
        }
  return project_window22(F);
}

double verify_F2_formula(const Scene& scene, const DefiningMapState& state) {
  if (state.corrected_to < 2)
    throw std::invalid_argument("verify_F2_formula: state must be corrected to order >= 2");
  Tensor formula = f2_closed_form(scene, *state.frame);
  const Tensor& extracted = state.residuals[1];
  double worst = 0.0;
  for (std::size_t i = 0; i < formula.size(); ++i)
    worst = std::max(worst,
                     std::fabs(formula.entry_flat(i).value() - extracted.entry_flat(i).value()));
  return worst;
}

}  // namespace exhol
