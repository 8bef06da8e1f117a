#pragma once

#include <cmath>
#include <memory>

#include "exhol/extrinsic.hpp"
#include "exhol/least_squares.hpp"

namespace exhol {

/// Insert a jet into a larger variable space: variable i of `src` becomes
/// variable var_map[i] of the target table; the remaining target variables do
/// not appear. The target base point must agree on mapped variables.
JetSeries embed_jet(const JetSeries& src, const TablePtr& target,
                    const std::vector<int>& var_map, const std::vector<double>& target_base);

/// Geometry of the tubular chart Phi(u, t) = iota(u) + t_alpha n_alpha(u):
/// the pulled-back metric, its Christoffels, and the scalar curvature data
/// needed by the conformal Gram matrix. Variables are ordered
/// (u_0..u_{m-1}, t_0..t_{k-1}).
struct TubularGeometry {
  int d = 0, k = 0, m = 0;
  std::string scale;
  TablePtr tab;              // d-variable table at order N
  std::vector<double> base;  // (u0, 0)
  std::shared_ptr<const FrameField> frame;

  JetMap phi;         // tubular chart into bulk coordinates
  JetMatrix ghat;     // metric in tubular coordinates
  JetMatrix ghat_inv;
  std::vector<JetSeries> gammahat;
  JetSeries jhat;     // Schouten trace J composed with Phi

  JetSeries zero() const { return JetSeries::zero(tab, base); }
  JetSeries t_var(int alpha) const { return JetSeries::variable(m + alpha, tab, base); }

  /// Laplace-Beltrami of a tubular-coordinate scalar.
  JetSeries laplacian(const JetSeries& f) const;

  /// u-jet of the coefficient of the t-monomial `t_mi` (length k).
  JetSeries t_coefficient(const JetSeries& f, const std::vector<int>& t_mi) const;

  /// Promote a u-jet to a t-independent tubular scalar.
  JetSeries from_u_jet(const JetSeries& uj) const;

  /// Evaluate at t = 0: all coefficients with nonzero t-degree dropped.
  JetSeries restrict_to_lambda(const JetSeries& f) const;
};

std::shared_ptr<const TubularGeometry> build_tubular(const Scene& scene,
                                                     const std::shared_ptr<const FrameField>& frame);

/// Gram matrix of a defining tuple in tubular coordinates, row-major k*k.
/// With `conformal`, subtracts (2/d) s_( (Delta + J) s_) per the conformal
/// representative formula.
std::vector<JetSeries> tubular_gram(const TubularGeometry& tub,
                                    const std::vector<JetSeries>& s_hat, bool conformal);

/// Extract the order-m coefficient tensor F_{alpha beta gamma_1..gamma_m}
/// (entries u-jets, symmetric in the pair and in the gammas) from a Gram
/// matrix in tubular coordinates.
Tensor extract_obstruction(const TubularGeometry& tub, const std::vector<JetSeries>& gram,
                           int order);

/// s_alpha -> s_alpha + A_{alpha gamma_1..gamma_p} s_{gamma_1}..s_{gamma_p}
/// with A a rank-(1+p) normal tensor with u-jet entries.
std::vector<JetSeries> apply_correction(const TubularGeometry& tub,
                                        const std::vector<JetSeries>& s_hat, const Tensor& A);

/// Flattening conventions shared by the probing and solving steps.
struct ObstructionLayout {
  int k, order;
  SymTuples pairs;   // (alpha <= beta)
  SymTuples gammas;  // symmetric gamma tuple of length `order`
  ObstructionLayout(int k_, int order_) : k(k_), order(order_), pairs(k_, 2), gammas(k_, order_) {}
  int dim() const { return pairs.count() * gammas.count(); }
  int index(int a, int b, const std::vector<int>& g) const {
    return pairs.rank({a, b}) * gammas.count() + gammas.rank(g);
  }
  /// sqrt of the orbit size of the entry: with this weight the Euclidean
  /// metric on the flattened vector equals the entrywise tensor metric, so a
  /// least-squares residual is the honest orthogonal complement projection.
  double weight(int flat) const {
    int pr = flat / gammas.count();
    int gr = flat % gammas.count();
    return std::sqrt(pairs.multiplicity(pr) * gammas.multiplicity(gr));
  }
};

struct CorrectionLayout {
  int k, order;
  SymTuples gammas;  // symmetric tuple of length order+1
  CorrectionLayout(int k_, int order_) : k(k_), order(order_), gammas(k_, order_ + 1) {}
  int dim() const { return k * gammas.count(); }
  int index(int a, const std::vector<int>& g) const { return a * gammas.count() + gammas.rank(g); }
  double weight(int flat) const { return std::sqrt(gammas.multiplicity(flat % gammas.count())); }
};

std::vector<JetSeries> flatten_obstruction(const Tensor& F, const ObstructionLayout& lay);
Tensor unflatten_obstruction(const std::vector<JetSeries>& flat, const ObstructionLayout& lay,
                             const JetSeries& proto);
Tensor unflatten_correction(const std::vector<JetSeries>& flat, const CorrectionLayout& lay,
                            const JetSeries& proto);

/// Measure the linear response of the order-m obstruction to unit constant
/// corrections at order m (columns ordered by CorrectionLayout).
UpdateMatrix probe_update_matrix(const TubularGeometry& tub, const std::vector<JetSeries>& s_hat,
                                 int order, bool conformal);

}  // namespace exhol
