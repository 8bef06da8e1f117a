#include "exhol/tractor.hpp"

#include <cmath>
#include <stdexcept>

namespace exhol {

ScaleContext make_scale_context(const Scene& scene, bool conformally_rescaled) {
  ScaleContext ctx;
  ctx.tag = scene.scale_tag(conformally_rescaled);
  ctx.d = scene.d;
  ctx.metric = scene.metric_jet(conformally_rescaled);
  ctx.curv = curvature_stack(ctx.metric);
  return ctx;
}

Density density_to_scale(const Density& phi, const JetSeries& omega, const std::string& new_tag) {
  Density out;
  out.scale = new_tag;
  out.weight = phi.weight;
  out.value = jet_mul(jet_pow(omega, phi.weight), phi.value);
  return out;
}

TractorTensor::TractorTensor(const ScaleContext& ctx, int n_tr, int n_bk, double w) {
  d = ctx.d;
  n_tractor = n_tr;
  n_bulk = n_bk;
  weight = w;
  scale = ctx.tag;
  std::size_t n = 1;
  for (int i = 0; i < n_tr; ++i) n *= static_cast<std::size_t>(d + 2);
  for (int i = 0; i < n_bk; ++i) n *= static_cast<std::size_t>(d);
  data.assign(n, ctx.zero());
}

std::size_t TractorTensor::offset(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != n_tractor + n_bulk)
    throw std::invalid_argument("TractorTensor: wrong index count");
  std::size_t off = 0;
  for (int i = 0; i < n_tractor; ++i)
    off = off * static_cast<std::size_t>(d + 2) + static_cast<std::size_t>(idx[i]);
  for (int i = 0; i < n_bulk; ++i)
    off = off * static_cast<std::size_t>(d) + static_cast<std::size_t>(idx[n_tractor + i]);
  return off;
}

TractorTensor& TractorTensor::operator+=(const TractorTensor& o) {
  if (data.size() != o.data.size()) throw std::invalid_argument("TractorTensor +=: shape mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

TractorTensor& TractorTensor::operator-=(const TractorTensor& o) {
  if (data.size() != o.data.size()) throw std::invalid_argument("TractorTensor -=: shape mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

TractorTensor TractorTensor::scaled(const JetSeries& s) const {
  TractorTensor r = *this;
  for (auto& e : r.data) e = jet_mul(e, s);
  return r;
}

TractorTensor TractorTensor::scaled(double s) const {
  TractorTensor r = *this;
  for (auto& e : r.data) e *= s;
  return r;
}

double TractorTensor::max_abs() const {
  double m = 0.0;
  for (const auto& e : data) m = std::max(m, e.max_abs_coeff());
  return m;
}

TractorTensor density_tractor(const ScaleContext& ctx, const JetSeries& value, double weight) {
  TractorTensor t(ctx, 0, 0, weight);
  t.data[0] = value;
  return t;
}

TractorTensor x_tractor(const ScaleContext& ctx) {
  TractorTensor t(ctx, 1, 0, 1.0);
  t.data[static_cast<std::size_t>(ctx.d + 1)] = JetSeries::constant(1.0, ctx.tab(), ctx.base());
  return t;
}

JetSeries h_entry(const ScaleContext& ctx, int A, int B) {
  const int d = ctx.d;
  if ((A == 0 && B == d + 1) || (A == d + 1 && B == 0))
    return JetSeries::constant(1.0, ctx.tab(), ctx.base());
  if (A >= 1 && A <= d && B >= 1 && B <= d) return ctx.metric.g.at(A - 1, B - 1);
  return ctx.zero();
}

TractorTensor tractor_metric(const ScaleContext& ctx) {
  TractorTensor t(ctx, 2, 0, 0.0);
  const int D = ctx.d + 2;
  for (int A = 0; A < D; ++A)
    for (int B = 0; B < D; ++B) t.at({A, B}) = h_entry(ctx, A, B);
  return t;
}

TractorTensor tractor_connection(const ScaleContext& ctx, const TractorTensor& t) {
  const int d = ctx.d;
  const int D = d + 2;
  TractorTensor r(ctx, t.n_tractor, t.n_bulk + 1, t.weight);

  const auto& gamma = ctx.curv.gamma;
  const Tensor& P = ctx.curv.schouten;

  std::vector<int> idx(static_cast<std::size_t>(t.n_tractor + t.n_bulk + 1));
  std::vector<int> src(static_cast<std::size_t>(t.n_tractor + t.n_bulk));
  const std::size_t rsize = r.size();
  for (std::size_t flat = 0; flat < rsize; ++flat) {
    // unravel into (slots..., a, bulk...)
    std::size_t rem = flat;
    for (int i = t.n_tractor + t.n_bulk; i >= 0; --i) {
      int dim = (i < t.n_tractor) ? D : d;
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
      rem /= static_cast<std::size_t>(dim);
    }
    const int a = idx[static_cast<std::size_t>(t.n_tractor)];
    for (int i = 0; i < t.n_tractor; ++i) src[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
    for (int i = 0; i < t.n_bulk; ++i)
      src[static_cast<std::size_t>(t.n_tractor + i)] = idx[static_cast<std::size_t>(t.n_tractor + 1 + i)];

    JetSeries acc = t.at(src).derivative(a);

    // Levi-Civita on middle-slot vector indices (up) of each tractor slot
    for (int p = 0; p < t.n_tractor; ++p) {
      const int s = src[static_cast<std::size_t>(p)];
      std::vector<int> alt = src;
      if (s >= 1 && s <= d) {
        const int b = s - 1;
        for (int c = 0; c < d; ++c) {
          alt[static_cast<std::size_t>(p)] = 1 + c;
          acc += jet_mul(gamma_at(gamma, d, b, a, c), t.at(alt));
        }
        alt[static_cast<std::size_t>(p)] = s;
      }
      // tractor couplings
      if (s == 0) {
        // top slot: -tau_a = -g_{ac} tau^c
        for (int c = 0; c < d; ++c) {
          alt[static_cast<std::size_t>(p)] = 1 + c;
          acc -= jet_mul(ctx.metric.g.at(a, c), t.at(alt));
        }
      } else if (s >= 1 && s <= d) {
        const int b = s - 1;
        // + delta_a^b tau^- + P_a^b tau^+
        if (b == a) {
          alt[static_cast<std::size_t>(p)] = d + 1;
          acc += t.at(alt);
        }
        alt[static_cast<std::size_t>(p)] = 0;
        JetSeries pab = ctx.zero();
        for (int c = 0; c < d; ++c)
          pab += jet_mul(ctx.metric.ginv.at(b, c), P.at({a, c}));
        acc += jet_mul(pab, t.at(alt));
      } else {
        // bottom slot: - P_{ac} tau^c
        for (int c = 0; c < d; ++c) {
          alt[static_cast<std::size_t>(p)] = 1 + c;
          acc -= jet_mul(P.at({a, c}), t.at(alt));
        }
      }
      // restore
      alt = src;
    }

    // Levi-Civita on the existing lower bulk indices
    for (int q = 0; q < t.n_bulk; ++q) {
      const int b = src[static_cast<std::size_t>(t.n_tractor + q)];
      std::vector<int> alt = src;
      for (int c = 0; c < d; ++c) {
        alt[static_cast<std::size_t>(t.n_tractor + q)] = c;
        acc -= jet_mul(gamma_at(gamma, d, c, a, b), t.at(alt));
      }
    }

    r.data[flat] = acc;
  }
  return r;
}

TractorTensor thomas_d(const ScaleContext& ctx, const TractorTensor& t) {
  if (t.n_bulk != 0)
    throw std::invalid_argument("thomas_d: open bulk indices are not supported");
  const int d = ctx.d;
  const double w = t.weight;
  const double top = w * (d + 2 * w - 2);
  const double mid = d + 2 * w - 2;

  TractorTensor grad = tractor_connection(ctx, t);         // (slots, a)
  TractorTensor hess = tractor_connection(ctx, grad);      // (slots, b, a)

  TractorTensor r(ctx, t.n_tractor + 1, 0, w - 1.0);
  std::vector<int> src(static_cast<std::size_t>(t.n_tractor));
  std::vector<int> gsrc(static_cast<std::size_t>(t.n_tractor + 1));
  std::vector<int> hsrc(static_cast<std::size_t>(t.n_tractor + 2));
  std::vector<int> ridx(static_cast<std::size_t>(t.n_tractor + 1));

  const std::size_t inner = t.size();
  for (std::size_t flat = 0; flat < inner; ++flat) {
    std::size_t rem = flat;
    for (int i = t.n_tractor - 1; i >= 0; --i) {
      src[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(d + 2));
      rem /= static_cast<std::size_t>(d + 2);
    }
    for (int i = 0; i < t.n_tractor; ++i) ridx[static_cast<std::size_t>(1 + i)] = src[static_cast<std::size_t>(i)];
    for (int i = 0; i < t.n_tractor; ++i) {
      gsrc[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(i)];
      hsrc[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(i)];
    }

    // top slot
    ridx[0] = 0;
    r.at(ridx) = t.at(src) * top;

    // vector slots: mid * g^{ab} grad_b
    for (int a = 0; a < d; ++a) {
      ridx[0] = 1 + a;
      JetSeries acc = ctx.zero();
      for (int b = 0; b < d; ++b) {
        gsrc[static_cast<std::size_t>(t.n_tractor)] = b;
        acc += jet_mul(ctx.metric.ginv.at(a, b), grad.at(gsrc));
      }
      r.at(ridx) = acc * mid;
    }

    // bottom slot: -(Delta^T + w J)
    ridx[0] = d + 1;
    JetSeries acc = ctx.zero();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        hsrc[static_cast<std::size_t>(t.n_tractor)] = a;
        hsrc[static_cast<std::size_t>(t.n_tractor + 1)] = b;
        acc += jet_mul(ctx.metric.ginv.at(a, b), hess.at(hsrc));
      }
    acc += w * jet_mul(ctx.curv.jtrace, t.at(src));
    r.at(ridx) = -acc;
  }
  return r;
}

TractorTensor hatted_thomas_d(const ScaleContext& ctx, const TractorTensor& t) {
  const double norm = ctx.d + 2 * t.weight - 2;
  if (std::fabs(norm) < 1e-12)
    throw std::invalid_argument("hatted_thomas_d: excluded weight w = 1 - d/2");
  return thomas_d(ctx, t).scaled(1.0 / norm);
}

TractorTensor contract_h(const ScaleContext& ctx, const TractorTensor& t, int i, int j) {
  if (i == j || i >= t.n_tractor || j >= t.n_tractor)
    throw std::invalid_argument("contract_h: bad slots");
  if (i > j) std::swap(i, j);
  const int d = ctx.d;
  const int D = d + 2;
  TractorTensor r(ctx, t.n_tractor - 2, t.n_bulk, t.weight);

  std::vector<int> src(static_cast<std::size_t>(t.n_tractor + t.n_bulk));
  const std::size_t rsize = std::max<std::size_t>(r.size(), 1);
  for (std::size_t flat = 0; flat < rsize; ++flat) {
    // unravel remaining indices
    std::vector<int> out;
    std::size_t rem = flat;
    std::vector<int> dims;
    for (int p = 0; p < t.n_tractor - 2; ++p) dims.push_back(D);
    for (int p = 0; p < t.n_bulk; ++p) dims.push_back(d);
    out.assign(dims.size(), 0);
    for (int p = static_cast<int>(dims.size()) - 1; p >= 0; --p) {
      out[static_cast<std::size_t>(p)] = static_cast<int>(rem % static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]));
      rem /= static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]);
    }
    int oi = 0;
    for (int p = 0; p < t.n_tractor; ++p) {
      if (p == i || p == j) continue;
      src[static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(oi++)];
    }
    for (int p = 0; p < t.n_bulk; ++p)
      src[static_cast<std::size_t>(t.n_tractor + p)] = out[static_cast<std::size_t>(oi++)];

    JetSeries acc = ctx.zero();
    // h pairing: + <-> -, vector <-> vector with g
    src[static_cast<std::size_t>(i)] = 0;
    src[static_cast<std::size_t>(j)] = d + 1;
    acc += t.at(src);
    src[static_cast<std::size_t>(i)] = d + 1;
    src[static_cast<std::size_t>(j)] = 0;
    acc += t.at(src);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        src[static_cast<std::size_t>(i)] = 1 + a;
        src[static_cast<std::size_t>(j)] = 1 + b;
        acc += jet_mul(ctx.metric.g.at(a, b), t.at(src));
      }
    r.data[flat] = acc;
  }
  return r;
}

TractorTensor contract_with(const ScaleContext& ctx, const TractorTensor& t, int slot,
                            const TractorTensor& v) {
  if (v.n_tractor != 1 || v.n_bulk != 0)
    throw std::invalid_argument("contract_with: v must be a rank-1 tractor");
  const int d = ctx.d;
  TractorTensor r(ctx, t.n_tractor - 1, t.n_bulk, t.weight + v.weight);

  std::vector<int> src(static_cast<std::size_t>(t.n_tractor + t.n_bulk));
  const std::size_t rsize = std::max<std::size_t>(r.size(), 1);
  for (std::size_t flat = 0; flat < rsize; ++flat) {
    std::vector<int> dims;
    for (int p = 0; p < t.n_tractor - 1; ++p) dims.push_back(d + 2);
    for (int p = 0; p < t.n_bulk; ++p) dims.push_back(d);
    std::vector<int> out(dims.size(), 0);
    std::size_t rem = flat;
    for (int p = static_cast<int>(dims.size()) - 1; p >= 0; --p) {
      out[static_cast<std::size_t>(p)] = static_cast<int>(rem % static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]));
      rem /= static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]);
    }
    int oi = 0;
    for (int p = 0; p < t.n_tractor; ++p) {
      if (p == slot) continue;
      src[static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(oi++)];
    }
    for (int p = 0; p < t.n_bulk; ++p)
      src[static_cast<std::size_t>(t.n_tractor + p)] = out[static_cast<std::size_t>(oi++)];

    JetSeries acc = ctx.zero();
    src[static_cast<std::size_t>(slot)] = d + 1;
    acc += jet_mul(v.data[0], t.at(src));  // v^+ t^-
    src[static_cast<std::size_t>(slot)] = 0;
    acc += jet_mul(v.data[static_cast<std::size_t>(d + 1)], t.at(src));  // v^- t^+
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        src[static_cast<std::size_t>(slot)] = 1 + b;
        acc += jet_mul(ctx.metric.g.at(a, b),
                       jet_mul(v.data[static_cast<std::size_t>(1 + a)], t.at(src)));
      }
    r.data[flat] = acc;
  }
  return r;
}

TractorTensor splitting_change(const ScaleContext& ctx, const TractorTensor& t,
                               const JetSeries& omega, const std::string& new_tag) {
  if (t.n_bulk != 0)
    throw std::invalid_argument("splitting_change: open bulk indices are not supported");
  const int d = ctx.d;
  const int D = d + 2;
  JetSeries logom = jet_log(omega);
  std::vector<JetSeries> ups(static_cast<std::size_t>(d));  // Upsilon_a
  for (int a = 0; a < d; ++a) ups[static_cast<std::size_t>(a)] = logom.derivative(a);
  std::vector<JetSeries> ups_up(static_cast<std::size_t>(d));  // Upsilon^a (scale-g raise)
  for (int a = 0; a < d; ++a) {
    JetSeries acc = ctx.zero();
    for (int b = 0; b < d; ++b) acc += jet_mul(ctx.metric.ginv.at(a, b), ups[static_cast<std::size_t>(b)]);
    ups_up[static_cast<std::size_t>(a)] = acc;
  }
  JetSeries ups2 = ctx.zero();
  for (int a = 0; a < d; ++a) ups2 += jet_mul(ups[static_cast<std::size_t>(a)], ups_up[static_cast<std::size_t>(a)]);

  // per-slot mixing matrix L (acting on an up tractor):
  //   (+, vec^a, -) -> (+, vec^a + Ups^a +slot, - - Ups_a vec^a - 1/2 Ups^2 +slot)
  auto mix_slot = [&](const TractorTensor& in, int p) {
    TractorTensor out = in;
    std::vector<int> idx(static_cast<std::size_t>(in.n_tractor));
    for (std::size_t flat = 0; flat < in.size(); ++flat) {
      std::size_t rem = flat;
      for (int i = in.n_tractor - 1; i >= 0; --i) {
        idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(D));
        rem /= static_cast<std::size_t>(D);
      }
      const int s = idx[static_cast<std::size_t>(p)];
      std::vector<int> alt = idx;
      if (s == 0) {
        out.data[flat] = in.at(idx);
      } else if (s <= d) {
        alt[static_cast<std::size_t>(p)] = 0;
        out.data[flat] = in.at(idx) + jet_mul(ups_up[static_cast<std::size_t>(s - 1)], in.at(alt));
      } else {
        JetSeries acc = in.at(idx);
        for (int a = 0; a < d; ++a) {
          alt[static_cast<std::size_t>(p)] = 1 + a;
          acc -= jet_mul(ups[static_cast<std::size_t>(a)], in.at(alt));
        }
        alt[static_cast<std::size_t>(p)] = 0;
        acc -= 0.5 * jet_mul(ups2, in.at(alt));
        out.data[flat] = acc;
      }
    }
    return out;
  };

  TractorTensor mixed = t;
  for (int p = 0; p < t.n_tractor; ++p) mixed = mix_slot(mixed, p);

  // representative factors: Omega^{w + sum sigma(s_i)} with sigma(+) = +1,
  // sigma(vec) = sigma(-) = -1
  TractorTensor out = mixed;
  out.scale = new_tag;
  std::vector<int> idx(static_cast<std::size_t>(t.n_tractor));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    int sig = 0;
    for (int i = t.n_tractor - 1; i >= 0; --i) {
      int s = static_cast<int>(rem % static_cast<std::size_t>(D));
      rem /= static_cast<std::size_t>(D);
      sig += (s == 0) ? 1 : -1;
    }
    out.data[flat] = jet_mul(jet_pow(omega, t.weight + sig), mixed.data[flat]);
  }
  return out;
}

ScaleTractorData scale_tractors(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk) {
  ScaleTractorData out;
  const int k = static_cast<int>(s_bulk.size());
  for (int al = 0; al < k; ++al) {
    TractorTensor sigma = density_tractor(ctx, s_bulk[static_cast<std::size_t>(al)], 1.0);
    out.N.push_back(hatted_thomas_d(ctx, sigma));
    // rho = bottom slot of N
    out.rho.push_back(out.N.back().data[static_cast<std::size_t>(ctx.d + 1)]);
  }
  out.gram.assign(static_cast<std::size_t>(k) * k, ctx.zero());
  for (int al = 0; al < k; ++al)
    for (int be = al; be < k; ++be) {
      TractorTensor g = contract_with(ctx, out.N[static_cast<std::size_t>(al)], 0,
                                      out.N[static_cast<std::size_t>(be)]);
      out.gram[static_cast<std::size_t>(al) * k + be] = g.data[0];
      out.gram[static_cast<std::size_t>(be) * k + al] = g.data[0];
    }
  return out;
}

SubmanifoldTractors submanifold_tractors(const ScaleContext& ctx,
                                         const std::vector<JetSeries>& s_bulk) {
  SubmanifoldTractors out;
  const int k = static_cast<int>(s_bulk.size());
  ScaleTractorData sd = scale_tractors(ctx, s_bulk);

  std::vector<TractorTensor> hdN;  // rank-2 hatted-D_A N_B, per beta
  for (int be = 0; be < k; ++be)
    hdN.push_back(hatted_thomas_d(ctx, sd.N[static_cast<std::size_t>(be)]));
  out.P = hdN;

  out.B.assign(static_cast<std::size_t>(k) * k, TractorTensor(ctx, 1, 0, -1.0));
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      // N_[al . hatted-D N^A_be]: contract the derivative slot (0) with N
      TractorTensor t1 = contract_with(ctx, hdN[static_cast<std::size_t>(be)], 0,
                                       sd.N[static_cast<std::size_t>(al)]);
      TractorTensor t2 = contract_with(ctx, hdN[static_cast<std::size_t>(al)], 0,
                                       sd.N[static_cast<std::size_t>(be)]);
      t1 -= t2;
      out.B[static_cast<std::size_t>(al) * k + be] = t1.scaled(0.5);
    }

  const IndexSpec nor{IndexKind::normal, false, k};
  out.K = Tensor({nor, nor}, ctx.zero());
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      // full double contraction h_{AC} h_{BD} P1^{AB} P2^{CD}
      const TractorTensor& p1 = hdN[static_cast<std::size_t>(al)];
      const TractorTensor& p2 = hdN[static_cast<std::size_t>(be)];
      const int D = ctx.d + 2;
      JetSeries acc = ctx.zero();
      for (int A = 0; A < D; ++A)
        for (int B = 0; B < D; ++B)
          for (int C = 0; C < D; ++C)
            for (int E = 0; E < D; ++E) {
              JetSeries hAC = h_entry(ctx, A, C);
              if (hAC.max_abs_coeff() == 0.0) continue;
              JetSeries hBE = h_entry(ctx, B, E);
              if (hBE.max_abs_coeff() == 0.0) continue;
              acc += jet_mul(jet_mul(hAC, hBE), jet_mul(p1.at({A, B}), p2.at({C, E})));
            }
      out.K.at({al, be}) = acc;
    }
  return out;
}

TractorTensor restrict_tractor(const TractorTensor& t, const FrameField& frame) {
  TractorTensor r = t;
  JetMap iota = frame.embedding_map();
  for (auto& e : r.data) e = jet_compose(e, iota);
  return r;
}

namespace {

// N_alpha . hatted-D applied to a bulk tractor tensor V, evaluated on the
// zero locus: the sigma-carrying slot drops there, leaving
// nabla^T_{n_alpha} V + w_V rho_alpha V. Entries are composed with iota.
TractorTensor ndot_hd_on_lambda(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk,
                                const FrameField& frame, int alpha, const TractorTensor& V) {
  const int d = ctx.d;
  TractorTensor grad = tractor_connection(ctx, V);  // (slots, a)

  // n^a_alpha = g^{ab} d_b s_alpha as bulk jets
  std::vector<JetSeries> n_up(static_cast<std::size_t>(d), ctx.zero());
  for (int a = 0; a < d; ++a) {
    JetSeries acc = ctx.zero();
    for (int b = 0; b < d; ++b)
      acc += jet_mul(ctx.metric.ginv.at(a, b), s_bulk[static_cast<std::size_t>(alpha)].derivative(b));
    n_up[static_cast<std::size_t>(a)] = acc;
  }
  JetSeries lap = ctx.zero();
  {
    // Laplace-Beltrami of s_alpha in bulk coordinates
    const auto& gamma = ctx.curv.gamma;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        JetSeries hess = s_bulk[static_cast<std::size_t>(alpha)].derivative(a).derivative(b);
        for (int c = 0; c < d; ++c)
          hess -= jet_mul(gamma_at(gamma, d, c, a, b),
                          s_bulk[static_cast<std::size_t>(alpha)].derivative(c));
        lap += jet_mul(ctx.metric.ginv.at(a, b), hess);
      }
  }
  JetSeries rho = -(1.0 / d) * (lap + jet_mul(ctx.curv.jtrace, s_bulk[static_cast<std::size_t>(alpha)]));

  TractorTensor out(ctx, V.n_tractor, 0, V.weight - 1.0);
  std::vector<int> gidx(static_cast<std::size_t>(V.n_tractor + 1));
  std::vector<int> vidx(static_cast<std::size_t>(V.n_tractor));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    for (int i = V.n_tractor - 1; i >= 0; --i) {
      vidx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(d + 2));
      rem /= static_cast<std::size_t>(d + 2);
    }
    for (int i = 0; i < V.n_tractor; ++i) gidx[static_cast<std::size_t>(i)] = vidx[static_cast<std::size_t>(i)];
    JetSeries acc = ctx.zero();
    for (int a = 0; a < d; ++a) {
      gidx[static_cast<std::size_t>(V.n_tractor)] = a;
      acc += jet_mul(n_up[static_cast<std::size_t>(a)], grad.at(gidx));
    }
    acc += V.weight * jet_mul(rho, V.at(vidx));
    out.data[flat] = acc;
  }
  return restrict_tractor(out, frame);
}

}  // namespace

TractorTensor p2_operator(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk,
                          const FrameField& frame, const TractorTensor& t) {
  const int k = static_cast<int>(s_bulk.size());
  const double expected_w = 0.5 * (2.0 + k - ctx.d);
  if (std::fabs(t.weight - expected_w) > 1e-12)
    throw std::invalid_argument("p2_operator: argument must have weight (2 + k - d)/2");

  ScaleTractorData sd = scale_tractors(ctx, s_bulk);
  TractorTensor D_t = thomas_d(ctx, t);

  TractorTensor acc(ctx, t.n_tractor, 0, t.weight - 2.0);
  bool first = true;
  for (int al = 0; al < k; ++al) {
    TractorTensor U = contract_with(ctx, D_t, 0, sd.N[static_cast<std::size_t>(al)]);
    TractorTensor term = ndot_hd_on_lambda(ctx, s_bulk, frame, al, U);
    if (first) {
      acc = term;
      first = false;
    } else {
      acc += term;
    }
  }
  return acc;
}

JetSeries p2_top_operator(const ScaleContext& ctx, const std::vector<JetSeries>& s_bulk,
                          const FrameField& frame, const JetSeries& f_value) {
  const int k = static_cast<int>(s_bulk.size());
  const double w = 0.5 * (2.0 + k - ctx.d);
  TractorTensor f = density_tractor(ctx, f_value, w);
  TractorTensor V = hatted_thomas_d(ctx, f);  // rank 1, weight w-1

  JetSeries out = JetSeries::zero(frame.utab(), frame.base_u);
  ScaleTractorData sd = scale_tractors(ctx, s_bulk);
  for (int be = 0; be < k; ++be) {
    TractorTensor hdV = ndot_hd_on_lambda(ctx, s_bulk, frame, be, V);  // rank 1, restricted
    TractorTensor Nr = restrict_tractor(sd.N[static_cast<std::size_t>(be)], frame);
    // h-pairing along the submanifold
    const int d = ctx.d;
    JetSeries acc = JetSeries::zero(frame.utab(), frame.base_u);
    acc += jet_mul(Nr.data[0], hdV.data[static_cast<std::size_t>(d + 1)]);
    acc += jet_mul(Nr.data[static_cast<std::size_t>(d + 1)], hdV.data[0]);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        acc += jet_mul(frame.g_along.at(a, b),
                       jet_mul(Nr.data[static_cast<std::size_t>(1 + a)],
                               hdV.data[static_cast<std::size_t>(1 + b)]));
    out += acc;
  }
  return out;
}

}  // namespace exhol
