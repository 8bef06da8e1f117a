#include "exhol/tubular.hpp"

#include <cmath>
#include <stdexcept>

#include "exhol/curvature.hpp"

namespace exhol {

JetSeries embed_jet(const JetSeries& src, const TablePtr& target,
                    const std::vector<int>& var_map, const std::vector<double>& target_base) {
  for (int i = 0; i < src.nvars(); ++i)
    if (std::fabs(src.base_point()[static_cast<std::size_t>(i)] -
                  target_base[static_cast<std::size_t>(var_map[static_cast<std::size_t>(i)])]) >
        1e-12)
      throw std::invalid_argument("embed_jet: base point mismatch");

  JetSeries out = JetSeries::zero(target, target_base);
  const auto& stab = *src.table();
  std::vector<int> tmi(static_cast<std::size_t>(target->nvars()), 0);
  for (int p = 0; p < stab.size(); ++p) {
    double c = src.coeff_at(p);
    if (c == 0.0) continue;
    const auto& mi = stab.index_at(p);
    std::fill(tmi.begin(), tmi.end(), 0);
    for (int v = 0; v < src.nvars(); ++v)
      tmi[static_cast<std::size_t>(var_map[static_cast<std::size_t>(v)])] = mi[v];
    int q = target->position(tmi);
    if (q >= 0) out.coeff_ref(q) = c;
  }
  return out.with_known_order(std::min(src.known_order(), target->order()));
}

JetSeries TubularGeometry::laplacian(const JetSeries& f) const {
  f.require_known_order(2, "tubular laplacian");
  JetSeries acc = zero();
  std::vector<JetSeries> df(static_cast<std::size_t>(d));
  for (int mu = 0; mu < d; ++mu) df[static_cast<std::size_t>(mu)] = f.derivative(mu);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      JetSeries hess = df[static_cast<std::size_t>(mu)].derivative(nu);
      for (int la = 0; la < d; ++la)
        hess -= jet_mul(gamma_at(gammahat, d, la, mu, nu), df[static_cast<std::size_t>(la)]);
      acc += jet_mul(ghat_inv.at(mu, nu), hess);
    }
  return acc;
}

JetSeries TubularGeometry::t_coefficient(const JetSeries& f, const std::vector<int>& t_mi) const {
  const TablePtr& utab = frame->utab();
  JetSeries out = JetSeries::zero(utab, frame->base_u);
  int tdeg = 0;
  for (int e : t_mi) tdeg += e;
  const auto& ftab = *f.table();
  std::vector<int> umi(static_cast<std::size_t>(m), 0);
  for (int p = 0; p < ftab.size(); ++p) {
    const auto& mi = ftab.index_at(p);
    bool match = true;
    for (int a = 0; a < k; ++a)
      if (mi[m + a] != t_mi[static_cast<std::size_t>(a)]) {
        match = false;
        break;
      }
    if (!match) continue;
    for (int v = 0; v < m; ++v) umi[static_cast<std::size_t>(v)] = mi[v];
    int q = utab->position(umi);
    if (q >= 0) out.coeff_ref(q) = f.coeff_at(p);
  }
  return out.with_known_order(std::max(0, f.known_order() - tdeg));
}

JetSeries TubularGeometry::from_u_jet(const JetSeries& uj) const {
  std::vector<int> var_map(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) var_map[static_cast<std::size_t>(i)] = i;
  return embed_jet(uj, tab, var_map, base);
}

JetSeries TubularGeometry::restrict_to_lambda(const JetSeries& f) const {
  JetSeries out = f;
  const auto& ftab = *f.table();
  for (int p = 0; p < ftab.size(); ++p) {
    const auto& mi = ftab.index_at(p);
    for (int a = 0; a < k; ++a)
      if (mi[m + a] != 0) {
        out.coeff_ref(p) = 0.0;
        break;
      }
  }
  return out;
}

std::shared_ptr<const TubularGeometry> build_tubular(
    const Scene& scene, const std::shared_ptr<const FrameField>& frame) {
  auto tub = std::make_shared<TubularGeometry>();
  tub->d = scene.d;
  tub->k = scene.k;
  tub->m = scene.lambda_dim();
  tub->scale = frame->scale;
  tub->tab = scene.ut_table();
  tub->base = scene.base_u;
  tub->base.resize(static_cast<std::size_t>(scene.d), 0.0);
  tub->frame = frame;

  const int d = scene.d, m = tub->m, k = scene.k;
  std::vector<int> u_map(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) u_map[static_cast<std::size_t>(i)] = i;

  // Phi^a = iota^a(u) + t_alpha n^a_alpha(u)
  std::vector<JetSeries> comps;
  comps.reserve(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    JetSeries acc = embed_jet(frame->embedding[static_cast<std::size_t>(a)], tub->tab, u_map,
                              tub->base);
    for (int al = 0; al < k; ++al) {
      JetSeries n_emb = embed_jet(frame->normal[static_cast<std::size_t>(al)][static_cast<std::size_t>(a)],
                                  tub->tab, u_map, tub->base);
      acc += jet_mul(tub->t_var(al), n_emb);
    }
    comps.push_back(acc);
  }
  tub->phi = JetMap(comps);

  // pulled-back metric ghat_munu = g_ab(Phi) dPhi^a_mu dPhi^b_nu
  const bool rescaled = frame->scale != "g";
  MetricJet bulk = scene.metric_jet(rescaled);
  std::vector<JetSeries> g_comp(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      g_comp[static_cast<std::size_t>(a) * d + b] = jet_compose(bulk.g.at(a, b), tub->phi);

  std::vector<std::vector<JetSeries>> dphi(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    dphi[static_cast<std::size_t>(a)].reserve(static_cast<std::size_t>(d));
    for (int mu = 0; mu < d; ++mu)
      dphi[static_cast<std::size_t>(a)].push_back(comps[static_cast<std::size_t>(a)].derivative(mu));
  }

  JetMatrix ghat(d, tub->zero());
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu; nu < d; ++nu) {
      JetSeries acc = tub->zero();
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          acc += jet_mul(g_comp[static_cast<std::size_t>(a) * d + b],
                         jet_mul(dphi[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)],
                                 dphi[static_cast<std::size_t>(b)][static_cast<std::size_t>(nu)]));
      ghat.at(mu, nu) = acc;
      ghat.at(nu, mu) = acc;
    }

  MetricJet mj = MetricJet::from_components(std::move(ghat));
  tub->ghat = mj.g;
  tub->ghat_inv = mj.ginv;
  tub->gammahat = christoffel(mj);

  CurvatureStack cs = curvature_stack(bulk);
  tub->jhat = jet_compose(cs.jtrace, tub->phi);
  return tub;
}

std::vector<JetSeries> tubular_gram(const TubularGeometry& tub,
                                    const std::vector<JetSeries>& s_hat, bool conformal) {
  const int d = tub.d, k = tub.k;
  std::vector<std::vector<JetSeries>> ds(static_cast<std::size_t>(k));
  for (int al = 0; al < k; ++al) {
    ds[static_cast<std::size_t>(al)].reserve(static_cast<std::size_t>(d));
    for (int mu = 0; mu < d; ++mu)
      ds[static_cast<std::size_t>(al)].push_back(s_hat[static_cast<std::size_t>(al)].derivative(mu));
  }

  std::vector<JetSeries> gram(static_cast<std::size_t>(k) * k, tub.zero());
  for (int al = 0; al < k; ++al)
    for (int be = al; be < k; ++be) {
      JetSeries acc = tub.zero();
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
          acc += jet_mul(tub.ghat_inv.at(mu, nu),
                         jet_mul(ds[static_cast<std::size_t>(al)][static_cast<std::size_t>(mu)],
                                 ds[static_cast<std::size_t>(be)][static_cast<std::size_t>(nu)]));
      gram[static_cast<std::size_t>(al) * k + be] = acc;
      gram[static_cast<std::size_t>(be) * k + al] = acc;
    }

  if (conformal) {
    std::vector<JetSeries> lap(static_cast<std::size_t>(k));
    for (int al = 0; al < k; ++al)
      lap[static_cast<std::size_t>(al)] =
          tub.laplacian(s_hat[static_cast<std::size_t>(al)]) +
          jet_mul(tub.jhat, s_hat[static_cast<std::size_t>(al)]);
    for (int al = 0; al < k; ++al)
      for (int be = al; be < k; ++be) {
        JetSeries corr = jet_mul(s_hat[static_cast<std::size_t>(al)], lap[static_cast<std::size_t>(be)]) +
                         jet_mul(s_hat[static_cast<std::size_t>(be)], lap[static_cast<std::size_t>(al)]);
        corr *= (1.0 / tub.d);
        gram[static_cast<std::size_t>(al) * k + be] -= corr;
        if (be != al) gram[static_cast<std::size_t>(be) * k + al] -= corr;
      }
  }
  return gram;
}

Tensor extract_obstruction(const TubularGeometry& tub, const std::vector<JetSeries>& gram,
                           int order) {
  const int k = tub.k;
  const JetSeries uproto = JetSeries::zero(tub.frame->utab(), tub.frame->base_u);
  std::vector<IndexSpec> shape(static_cast<std::size_t>(2 + order),
                               IndexSpec{IndexKind::normal, false, k});
  Tensor F(shape, uproto);

  SymTuples tuples(k, order);
  std::vector<int> idx(static_cast<std::size_t>(2 + order));
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      const JetSeries& g = gram[static_cast<std::size_t>(al) * k + be];
      for (int r = 0; r < tuples.count(); ++r) {
        const auto& tup = tuples.tuple(r);
        std::vector<int> tmi(static_cast<std::size_t>(k), 0);
        for (int e : tup) ++tmi[static_cast<std::size_t>(e)];
        JetSeries c = tub.t_coefficient(g, tmi);
        // The t^mu Taylor coefficient collects mult(mu) equal terms of the
        // gamma-summed expansion, so the symmetric tensor entry is c/mult.
        JetSeries entry = c * (1.0 / tuples.multiplicity(r));
        // write into every arrangement of the gamma tuple
        idx[0] = al;
        idx[1] = be;
        std::vector<int> arr = tup;
        std::sort(arr.begin(), arr.end());
        do {
          for (int i = 0; i < order; ++i) idx[static_cast<std::size_t>(2 + i)] = arr[static_cast<std::size_t>(i)];
          F.at(idx) = entry;
        } while (std::next_permutation(arr.begin(), arr.end()));
      }
    }
  return F;
}

std::vector<JetSeries> apply_correction(const TubularGeometry& tub,
                                        const std::vector<JetSeries>& s_hat, const Tensor& A) {
  const int k = tub.k;
  const int p = A.rank() - 1;
  SymTuples tuples(k, p);
  std::vector<JetSeries> out = s_hat;
  std::vector<int> idx(static_cast<std::size_t>(1 + p));
  for (int al = 0; al < k; ++al) {
    JetSeries acc = tub.zero();
    for (int r = 0; r < tuples.count(); ++r) {
      const auto& tup = tuples.tuple(r);
      idx[0] = al;
      for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(1 + i)] = tup[static_cast<std::size_t>(i)];
      const JetSeries& coeff_u = A.at(idx);
      if (coeff_u.max_abs_coeff() == 0.0) continue;
      // The correction coefficients are exact through their known u-order and
      // zero beyond it; the zeros only touch Gram coefficients at u-orders
      // that were equally unknown, so the tuple keeps its full-order tag and
      // base-point extractions stay exact at every subsequent order.
      JetSeries term =
          tub.from_u_jet(coeff_u).with_known_order(tub.tab->order()) * tuples.multiplicity(r);
      for (int e : tup) term = jet_mul(term, s_hat[static_cast<std::size_t>(e)]);
      acc += term;
    }
    out[static_cast<std::size_t>(al)] += acc;
  }
  return out;
}

std::vector<JetSeries> flatten_obstruction(const Tensor& F, const ObstructionLayout& lay) {
  std::vector<JetSeries> flat(static_cast<std::size_t>(lay.dim()), F.proto());
  std::vector<int> idx(static_cast<std::size_t>(2 + lay.order));
  for (int pr = 0; pr < lay.pairs.count(); ++pr) {
    const auto& pair = lay.pairs.tuple(pr);
    for (int gr = 0; gr < lay.gammas.count(); ++gr) {
      const auto& tup = lay.gammas.tuple(gr);
      idx[0] = pair[0];
      idx[1] = pair[1];
      for (int i = 0; i < lay.order; ++i) idx[static_cast<std::size_t>(2 + i)] = tup[static_cast<std::size_t>(i)];
      const int fi = pr * lay.gammas.count() + gr;
      flat[static_cast<std::size_t>(fi)] = F.at(idx) * lay.weight(fi);
    }
  }
  return flat;
}

Tensor unflatten_obstruction(const std::vector<JetSeries>& flat, const ObstructionLayout& lay,
                             const JetSeries& proto) {
  std::vector<IndexSpec> shape(static_cast<std::size_t>(2 + lay.order),
                               IndexSpec{IndexKind::normal, false, lay.k});
  Tensor F(shape, proto);
  std::vector<int> idx(static_cast<std::size_t>(2 + lay.order));
  for (int pr = 0; pr < lay.pairs.count(); ++pr) {
    const auto& pair = lay.pairs.tuple(pr);
    for (int gr = 0; gr < lay.gammas.count(); ++gr) {
      const auto& tup = lay.gammas.tuple(gr);
      const int fi = pr * lay.gammas.count() + gr;
      JetSeries v = flat[static_cast<std::size_t>(fi)] * (1.0 / lay.weight(fi));
      std::vector<int> arr = tup;
      std::sort(arr.begin(), arr.end());
      do {
        for (int i = 0; i < lay.order; ++i) idx[static_cast<std::size_t>(2 + i)] = arr[static_cast<std::size_t>(i)];
        idx[0] = pair[0];
        idx[1] = pair[1];
        F.at(idx) = v;
        idx[0] = pair[1];
        idx[1] = pair[0];
        F.at(idx) = v;
      } while (std::next_permutation(arr.begin(), arr.end()));
    }
  }
  return F;
}

Tensor unflatten_correction(const std::vector<JetSeries>& flat, const CorrectionLayout& lay,
                            const JetSeries& proto) {
  std::vector<IndexSpec> shape(static_cast<std::size_t>(2 + lay.order),
                               IndexSpec{IndexKind::normal, false, lay.k});
  Tensor A(shape, proto);
  std::vector<int> idx(static_cast<std::size_t>(2 + lay.order));
  for (int a = 0; a < lay.k; ++a)
    for (int gr = 0; gr < lay.gammas.count(); ++gr) {
      const auto& tup = lay.gammas.tuple(gr);
      const int fi = a * lay.gammas.count() + gr;
      JetSeries v = flat[static_cast<std::size_t>(fi)] * (1.0 / lay.weight(fi));
      std::vector<int> arr = tup;
      std::sort(arr.begin(), arr.end());
      idx[0] = a;
      do {
        for (std::size_t i = 0; i < arr.size(); ++i) idx[1 + i] = arr[i];
        A.at(idx) = v;
      } while (std::next_permutation(arr.begin(), arr.end()));
    }
  return A;
}

UpdateMatrix probe_update_matrix(const TubularGeometry& tub, const std::vector<JetSeries>& s_hat,
                                 int order, bool conformal) {
  const int k = tub.k;
  ObstructionLayout olay(k, order);
  CorrectionLayout clay(k, order);
  const JetSeries uproto = JetSeries::zero(tub.frame->utab(), tub.frame->base_u);

  Tensor base_F = extract_obstruction(tub, tubular_gram(tub, s_hat, conformal), order);
  std::vector<JetSeries> base_flat = flatten_obstruction(base_F, olay);

  UpdateMatrix U(olay.dim(), clay.dim());
  std::vector<JetSeries> unit_flat(static_cast<std::size_t>(clay.dim()), uproto);
  for (int c = 0; c < clay.dim(); ++c) {
    for (auto& j : unit_flat) j = uproto;
    unit_flat[static_cast<std::size_t>(c)] = JetSeries::constant(1.0, uproto.table(), uproto.base_point());
    Tensor E = unflatten_correction(unit_flat, clay, uproto);
    std::vector<JetSeries> probed = apply_correction(tub, s_hat, E);
    Tensor F = extract_obstruction(tub, tubular_gram(tub, probed, conformal), order);
    std::vector<JetSeries> flat = flatten_obstruction(F, olay);
    for (int r = 0; r < olay.dim(); ++r)
      U.at(r, c) = flat[static_cast<std::size_t>(r)].value() - base_flat[static_cast<std::size_t>(r)].value();
  }
  return U;
}

}  // namespace exhol
