#include "exhol/curvature.hpp"

#include <stdexcept>

namespace exhol {

RiemannBundle riemann_bundle(const JetMatrix& g, const JetMatrix& ginv,
                             const std::vector<JetSeries>& gamma, IndexKind kind) {
  const int n = g.dim();
  const JetSeries proto =
      JetSeries::zero(g.at(0, 0).table(), g.at(0, 0).base_point());
  const IndexSpec lo{kind, false, n};
  const IndexSpec up{kind, true, n};

  RiemannBundle rb;
  rb.riemann_ud = Tensor({lo, lo, up, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          JetSeries acc = gamma_at(gamma, n, c, b, d).derivative(a) -
                          gamma_at(gamma, n, c, a, d).derivative(b);
          for (int e = 0; e < n; ++e) {
            acc += jet_mul(gamma_at(gamma, n, c, a, e), gamma_at(gamma, n, e, b, d));
            acc -= jet_mul(gamma_at(gamma, n, c, b, e), gamma_at(gamma, n, e, a, d));
          }
          rb.riemann_ud.at({a, b, c, d}) = acc;
        }
    }

  rb.riemann = Tensor({lo, lo, lo, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          JetSeries acc = proto;
          for (int e = 0; e < n; ++e)
            acc += jet_mul(g.at(c, e), rb.riemann_ud.at({a, b, e, d}));
          rb.riemann.at({a, b, c, d}) = acc;
        }

  rb.ricci = Tensor({lo, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      JetSeries acc = proto;
      for (int c = 0; c < n; ++c) acc += rb.riemann_ud.at({c, a, c, b});
      rb.ricci.at({a, b}) = acc;
    }

  rb.scalar = proto;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rb.scalar += jet_mul(ginv.at(a, b), rb.ricci.at({a, b}));

  return rb;
}

CurvatureStack curvature_stack(const MetricJet& m) {
  const int n = m.dim;
  if (n < 3) throw std::invalid_argument("curvature_stack: requires dimension >= 3");
  m.g.at(0, 0).require_known_order(3, "curvature_stack");

  CurvatureStack cs;
  cs.dim = n;
  cs.gamma = christoffel(m);
  RiemannBundle rb = riemann_bundle(m.g, m.ginv, cs.gamma, IndexKind::bulk);
  cs.riemann_ud = std::move(rb.riemann_ud);
  cs.riemann = std::move(rb.riemann);
  cs.ricci = std::move(rb.ricci);
  cs.scalar = std::move(rb.scalar);

  const JetSeries proto = JetSeries::zero(m.table(), m.base());
  const IndexSpec lo{IndexKind::bulk, false, n};

  cs.schouten = Tensor({lo, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      cs.schouten.at({a, b}) =
          (cs.ricci.at({a, b}) - (0.5 / (n - 1)) * jet_mul(cs.scalar, m.g.at(a, b))) *
          (1.0 / (n - 2));

  cs.jtrace = proto;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) cs.jtrace += jet_mul(m.ginv.at(a, b), cs.schouten.at({a, b}));

  cs.weyl = Tensor({lo, lo, lo, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          JetSeries acc = cs.riemann.at({a, b, c, d});
          acc -= jet_mul(m.g.at(a, c), cs.schouten.at({b, d}));
          acc += jet_mul(m.g.at(b, c), cs.schouten.at({a, d}));
          acc += jet_mul(m.g.at(a, d), cs.schouten.at({b, c}));
          acc -= jet_mul(m.g.at(b, d), cs.schouten.at({a, c}));
          cs.weyl.at({a, b, c, d}) = acc;
        }

  Tensor dp = covariant_derivative(cs.schouten, cs.gamma, n);
  cs.cotton = Tensor({lo, lo, lo}, proto);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        cs.cotton.at({a, b, c}) = dp.at({a, b, c}) - dp.at({b, a, c});

  return cs;
}

}  // namespace exhol
