#pragma once

#include "exhol/curvature.hpp"
#include "exhol/jet_map.hpp"
#include "exhol/scene.hpp"

namespace exhol {

/// Orthonormal normal frame along the embedded submanifold, carried as u-jets
/// about the scene base parameter, together with the restricted bulk data
/// needed to differentiate along the submanifold.
struct FrameField {
  int d = 0, k = 0;
  std::string scale;
  std::vector<double> base_u;

  std::vector<JetSeries> embedding;             // iota^a(u), d entries
  std::vector<std::vector<JetSeries>> tangent;  // e_i^a = d iota^a / d u_i
  std::vector<std::vector<JetSeries>> normal;   // n_alpha^a, orthonormal

  JetMatrix g_along;                // g_ab(iota(u))
  JetMatrix ginv_along;             // g^ab(iota(u))
  std::vector<JetSeries> gamma_along;  // bulk Christoffels along the submanifold
  JetMatrix gbar;                   // induced metric gbar_ij
  JetMatrix gbar_inv;

  int lambda_dim() const { return d - k; }
  const TablePtr& utab() const { return embedding[0].table(); }
  JetSeries zero_jet() const { return JetSeries::zero(utab(), base_u); }

  /// g(iota(u))-inner product of two bulk vectors along the submanifold.
  JetSeries dot(const std::vector<JetSeries>& a, const std::vector<JetSeries>& b) const;

  /// Pullback connection: (nabla^T_i v)^a for a bulk vector field v(u) along
  /// the submanifold.
  std::vector<JetSeries> tangential_cov_deriv(const std::vector<JetSeries>& v, int i) const;

  /// The embedding as a JetMap, for composing bulk jets to u-jets.
  JetMap embedding_map() const { return JetMap(embedding); }

  /// Compose a bulk (x-)jet with the embedding.
  JetSeries restrict_to_lambda(const JetSeries& bulk) const {
    return jet_compose(bulk, embedding_map());
  }
};

/// Gram-Schmidt frame from the scene's seeds (or deterministic axis seeds
/// when none are given). `conformally_rescaled` builds the frame for the
/// metric Omega^2 g instead of g.
FrameField build_frame(const Scene& scene, bool conformally_rescaled = false);

/// Replace n_alpha by m_alphabeta(u) n_beta; m must be orthogonal to 1e-10.
FrameField apply_gauge(const FrameField& frame, const std::vector<std::vector<JetSeries>>& m);

/// Rotation minimizing frame along a curve (d-k == 1), obtained by solving
/// the normal parallel-transport condition order by order in the u-jet.
/// Rejects higher-dimensional submanifolds.
FrameField rotation_minimizing_frame(const Scene& scene, bool conformally_rescaled = false);

/// Coulomb gauge for k == 2 frames over a curve: returns the rotation angle
/// theta(u) solving dbar Laplacian theta = -dbar . beta by quadrature, with
/// theta(u0) = theta'(u0) = 0, and the gauged frame.
struct CoulombResult {
  JetSeries theta;
  FrameField frame;
};
CoulombResult coulomb_gauge_curve(const FrameField& frame);

}  // namespace exhol
