#pragma once

#include "exhol/metric.hpp"

namespace exhol {

/// Riemann-level curvature of any jet metric (bulk or induced). Conventions:
/// riemann_ud is R_ab^c_d defined by [nabla_a, nabla_b] x^c = R_ab^c_d x^d;
/// riemann carries the lowered third index, R_abcd = g_ce R_ab^e_d;
/// ricci_ab = R_ca^c_b and scalar = g^ab Ric_ab.
struct RiemannBundle {
  Tensor riemann_ud;
  Tensor riemann;
  Tensor ricci;
  JetSeries scalar;
};

RiemannBundle riemann_bundle(const JetMatrix& g, const JetMatrix& ginv,
                             const std::vector<JetSeries>& gamma, IndexKind kind);

/// Full bulk curvature stack: Riemann data plus Schouten P_ab (trace J),
/// Weyl W_abcd, and Cotton C_abc = nabla_a P_bc - nabla_b P_ac.
struct CurvatureStack {
  int dim = 0;
  Tensor riemann_ud;  // R_ab^c_d
  Tensor riemann;     // R_abcd
  Tensor ricci;       // Ric_ab
  JetSeries scalar;   // Sc
  Tensor schouten;    // P_ab
  JetSeries jtrace;   // J = P^a_a
  Tensor weyl;        // W_abcd
  Tensor cotton;      // C_abc
  std::vector<JetSeries> gamma;  // Christoffels of the underlying metric
};

/// Requires d >= 3 and jet order >= 3 for the Cotton tensor.
CurvatureStack curvature_stack(const MetricJet& m);

}  // namespace exhol
