#pragma once

#include "exhol/extrinsic.hpp"
#include "exhol/report.hpp"

namespace exhol {

/// Bulk curvature composed along the submanifold (entries become u-jets,
/// indices stay bulk).
struct RestrictedCurvature {
  Tensor riemann;   // R_abcd
  Tensor weyl;      // W_abcd
  Tensor schouten;  // P_ab
  Tensor cotton;    // C_abc
  JetSeries jtrace;
};

RestrictedCurvature restrict_curvature(const CurvatureStack& cs, const FrameField& frame);

/// Contract every slot of a bulk-indexed tensor along the submanifold with
/// either a tangent vector (pattern entry 0, result index tangential) or a
/// frame normal (pattern entry 1, result index normal-frame).
Tensor project_slots(const Tensor& along, const FrameField& frame,
                     const std::vector<int>& pattern);

struct IdentityReport {
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Residuals of the classical submanifold identities (Gauss,
/// Codazzi-Mainardi, Ricci) and their traced/trace-free refinements
/// (Fialkow-Gauss, theorema egregium, traced and trace-free Codazzi), each as
/// a max-norm of left minus right at the base point. Identities whose
/// dimensional preconditions fail are skipped with a note.
IdentityReport classical_identity_residuals(const Scene& scene, const FrameField& frame,
                                            double tolerance = 1e-7);

}  // namespace exhol
