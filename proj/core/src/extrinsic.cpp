#include "exhol/extrinsic.hpp"

#include <stdexcept>

namespace exhol {

InducedGeometry induced_geometry(const FrameField& frame) {
  InducedGeometry ig;
  ig.gbar = frame.gbar;
  ig.gbar_inv = frame.gbar_inv;
  const int m = frame.lambda_dim();

  std::vector<JetSeries> dg(static_cast<std::size_t>(m) * m * m);
  for (int c = 0; c < m; ++c)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        dg[(static_cast<std::size_t>(c) * m + a) * m + b] = ig.gbar.at(a, b).derivative(c);
  auto dG = [&](int c, int a, int b) -> const JetSeries& {
    return dg[(static_cast<std::size_t>(c) * m + a) * m + b];
  };

  ig.gammabar.assign(static_cast<std::size_t>(m) * m * m, frame.zero_jet());
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = b; c < m; ++c) {
        JetSeries acc = frame.zero_jet();
        for (int e = 0; e < m; ++e)
          acc += jet_mul(ig.gbar_inv.at(a, e), dG(b, e, c) + dG(c, e, b) - dG(e, b, c));
        acc *= 0.5;
        ig.gammabar[(static_cast<std::size_t>(a) * m + b) * m + c] = acc;
        ig.gammabar[(static_cast<std::size_t>(a) * m + c) * m + b] = acc;
      }
  return ig;
}

ExtrinsicData extrinsic_data(const FrameField& frame) {
  const int m = frame.lambda_dim();
  const int k = frame.k;
  const JetSeries proto = frame.zero_jet();
  const IndexSpec tlo{IndexKind::tangent, false, m};
  const IndexSpec nor{IndexKind::normal, false, k};

  ExtrinsicData ex;
  ex.d = frame.d;
  ex.k = k;

  // Pullback covariant derivatives of the frame vectors.
  std::vector<std::vector<std::vector<JetSeries>>> dn(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    dn[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
      dn[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] =
          frame.tangential_cov_deriv(frame.normal[static_cast<std::size_t>(a)], i);
  }

  // II_ij alpha = gbar_jc nabla^T_i n^c_alpha = -n_alpha . nabla^T_i e_j.
  ex.II = Tensor({tlo, tlo, nor}, proto);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      std::vector<JetSeries> de = frame.tangential_cov_deriv(frame.tangent[static_cast<std::size_t>(j)], i);
      for (int a = 0; a < k; ++a)
        ex.II.at({i, j, a}) = -frame.dot(frame.normal[static_cast<std::size_t>(a)], de);
    }
  }

  ex.H = Tensor({nor}, proto);
  for (int a = 0; a < k; ++a) {
    JetSeries acc = proto;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) acc += jet_mul(frame.gbar_inv.at(i, j), ex.II.at({i, j, a}));
    ex.H.at({a}) = acc * (1.0 / m);
  }

  ex.II0 = ex.II;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int a = 0; a < k; ++a)
        ex.II0.at({i, j, a}) -= jet_mul(frame.gbar.at(i, j), ex.H.at({a}));

  // beta_i alpha beta = n_alpha . nabla^T_i n_beta.
  ex.beta = Tensor({tlo, nor, nor}, proto);
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        ex.beta.at({i, a, b}) = frame.dot(frame.normal[static_cast<std::size_t>(a)],
                                          dn[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]);

  // R = d beta + [beta, beta] on the frame-matrix convention (beta_i)_ab.
  ex.ncurv = Tensor({tlo, tlo, nor, nor}, proto);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          JetSeries acc = ex.beta.at({j, a, b}).derivative(i) - ex.beta.at({i, a, b}).derivative(j);
          for (int c = 0; c < k; ++c) {
            acc += jet_mul(ex.beta.at({i, a, c}), ex.beta.at({j, c, b}));
            acc -= jet_mul(ex.beta.at({j, a, c}), ex.beta.at({i, c, b}));
          }
          ex.ncurv.at({i, j, a, b}) = acc;
        }

  return ex;
}

Tensor surface_covariant_derivative(const Tensor& t, const InducedGeometry& ig) {
  const int m = ig.gbar.dim();
  std::vector<IndexSpec> shape;
  shape.push_back({IndexKind::tangent, false, m});
  for (const auto& s : t.shape()) shape.push_back(s);
  Tensor r(shape, t.proto());
  r.set_weight(t.weight());

  std::vector<int> tidx(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    std::vector<int> idx = r.unravel(flat);
    const int a = idx[0];
    for (int i = 0; i < t.rank(); ++i) tidx[static_cast<std::size_t>(i)] = idx[i + 1];
    JetSeries acc = t.at(tidx).derivative(a);
    for (int pos = 0; pos < t.rank(); ++pos) {
      if (t.spec(pos).kind == IndexKind::normal) continue;
      if (t.spec(pos).kind != IndexKind::tangent)
        throw std::invalid_argument(
            "surface_covariant_derivative: only tangent and normal indices supported");
      const int b = tidx[static_cast<std::size_t>(pos)];
      std::vector<int> src = tidx;
      for (int c = 0; c < m; ++c) {
        src[static_cast<std::size_t>(pos)] = c;
        if (t.spec(pos).up)
          acc += jet_mul(gamma_at(ig.gammabar, m, b, a, c), t.at(src));
        else
          acc -= jet_mul(gamma_at(ig.gammabar, m, c, a, b), t.at(src));
      }
    }
    r.entry_flat(flat) = acc;
  }
  return r;
}

InducedCurvature induced_curvature(const InducedGeometry& ig) {
  InducedCurvature ic;
  ic.rb = riemann_bundle(ig.gbar, ig.gbar_inv, ig.gammabar, IndexKind::tangent);
  const int m = ig.gbar.dim();
  if (m >= 3) {
    ic.has_schouten = true;
    const JetSeries proto = JetSeries::zero(ig.gbar.at(0, 0).table(), ig.gbar.at(0, 0).base_point());
    ic.schouten = Tensor({{IndexKind::tangent, false, m}, {IndexKind::tangent, false, m}}, proto);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        ic.schouten.at({a, b}) =
            (ic.rb.ricci.at({a, b}) - (0.5 / (m - 1)) * jet_mul(ic.rb.scalar, ig.gbar.at(a, b))) *
            (1.0 / (m - 2));
    ic.jtrace = proto;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        ic.jtrace += jet_mul(ig.gbar_inv.at(a, b), ic.schouten.at({a, b}));
  }
  return ic;
}

}  // namespace exhol
