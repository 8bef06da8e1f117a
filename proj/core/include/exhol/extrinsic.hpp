#pragma once

#include "exhol/frame.hpp"

namespace exhol {

/// Induced Levi-Civita data of the submanifold.
struct InducedGeometry {
  JetMatrix gbar, gbar_inv;
  std::vector<JetSeries> gammabar;  // Gammabar^i_jk
};

InducedGeometry induced_geometry(const FrameField& frame);

/// Second fundamental form II_ab alpha (paper sign: II_θθ = +r for the circle
/// of radius r with outward radial normal), mean curvature H_alpha, trace-free
/// part, normal fundamental forms beta_a alpha beta, and the normal curvature
/// two-form R_ab alpha beta = (d beta + [beta, beta])_ab alpha beta. All
/// carried as u-jets.
struct ExtrinsicData {
  int d = 0, k = 0;
  Tensor II;     // (tangent lo, tangent lo, normal)
  Tensor H;      // (normal)
  Tensor II0;    // trace-free II
  Tensor beta;   // (tangent lo, normal, normal), antisymmetric in the frame pair
  Tensor ncurv;  // (tangent lo, tangent lo, normal, normal)
};

ExtrinsicData extrinsic_data(const FrameField& frame);

/// Covariant derivative along the submanifold: tangent indices receive
/// induced Christoffels, normal-frame labels pass through untouched (the
/// usual convention where normal-connection terms appear explicitly). The new
/// lower tangent index is prepended.
Tensor surface_covariant_derivative(const Tensor& t, const InducedGeometry& ig);

/// Riemann-level curvature of the induced metric, plus Schouten/J when the
/// submanifold dimension is at least 3.
struct InducedCurvature {
  RiemannBundle rb;
  bool has_schouten = false;
  Tensor schouten;
  JetSeries jtrace;
};

InducedCurvature induced_curvature(const InducedGeometry& ig);

}  // namespace exhol
