#include <doctest.h>

#include <cmath>

#include "exhol/conformal.hpp"
#include "exhol/tractor.hpp"

using namespace exhol;

namespace {

Scene load(const char* name) {
  return Scene::from_json_file(std::string(EXHOL_SCENE_DIR) + "/" + name);
}

JetSeries expr_jet(const ScaleContext& ctx, const std::string& src) {
  std::vector<std::string> scope;
  for (int i = 0; i < ctx.d; ++i) scope.push_back("x" + std::to_string(i));
  return jet_eval(parse_expression(src, scope), ctx.base(), ctx.tab());
}

ConfDefiningState conf_state(const Scene& sc, int order, bool rescaled = false) {
  auto frame = std::make_shared<FrameField>(build_frame(sc, rescaled));
  ConfDefiningState state = conf_build_initial(sc, frame);
  if (rescaled) state.st.conformal = true;
  if (order >= 1) conf_correct_order1(state);
  if (order >= 2) conf_correct_order2(state);
  if (order >= 3) conf_correct_order3(state);
  return state;
}

}  // namespace

TEST_CASE("flat space: nabla X has the identity in the middle slot") {
  ScaleContext ctx = make_scale_context(load("flat_plane.json"));
  TractorTensor grad = tractor_connection(ctx, x_tractor(ctx));
  for (int a = 0; a < ctx.d; ++a) {
    CHECK(grad.at({0, a}).max_abs_coeff() < 1e-14);
    CHECK(grad.at({ctx.d + 1, a}).max_abs_coeff() < 1e-14);
    for (int b = 0; b < ctx.d; ++b) {
      JetSeries e = grad.at({1 + b, a});
      if (a == b) e -= 1.0;
      CHECK(e.max_abs_coeff() < 1e-14);
    }
  }
}

TEST_CASE("flat space: parallel tractors stay parallel") {
  ScaleContext ctx = make_scale_context(load("flat_plane.json"));
  const int d = ctx.d;
  // tau^- = c, tau^b = v^b - c x^b, tau^+ = a0 + v.x - c |x|^2 / 2
  const double c = 0.7, a0 = 0.3;
  const double v[4] = {0.2, -0.4, 0.5, 0.1};
  TractorTensor T(ctx, 1, 0, 0.0);
  JetSeries top = JetSeries::constant(a0, ctx.tab(), ctx.base());
  for (int b = 0; b < d; ++b) {
    JetSeries xb = JetSeries::variable(b, ctx.tab(), ctx.base());
    top += v[b] * xb - 0.5 * c * xb * xb;
    T.data[static_cast<std::size_t>(1 + b)] = v[b] - c * xb;
  }
  T.data[0] = top;
  T.data[static_cast<std::size_t>(d + 1)] = JetSeries::constant(c, ctx.tab(), ctx.base());
  CHECK(tractor_connection(ctx, T).max_abs() < 1e-12);
}

TEST_CASE("tractor connection is metric compatible") {
  // the connection implementation carries up slots, so check compatibility
  // through the pairing: d <T,U> = <grad T, U> + <T, grad U>
  ScaleContext ctx = make_scale_context(load("curved_d4.json"));
  const int d = ctx.d;
  TractorTensor T(ctx, 1, 0, 0.5);
  TractorTensor U(ctx, 1, 0, -0.5);
  for (int s = 0; s < d + 2; ++s) {
    T.data[static_cast<std::size_t>(s)] = expr_jet(ctx, "0.4 + 0.2*x" + std::to_string(s % d));
    U.data[static_cast<std::size_t>(s)] =
        expr_jet(ctx, "0.1 - 0.3*x" + std::to_string((s + 2) % d));
  }
  TractorTensor gT = tractor_connection(ctx, T);
  TractorTensor gU = tractor_connection(ctx, U);
  JetSeries pair = contract_with(ctx, T, 0, U).data[0];
  for (int a = 0; a < d; ++a) {
    JetSeries lhs = pair.derivative(a);
    // slice the gradient at the bulk index a as rank-1 tractors
    TractorTensor gTa(ctx, 1, 0, T.weight), gUa(ctx, 1, 0, U.weight);
    for (int s = 0; s < d + 2; ++s) {
      gTa.data[static_cast<std::size_t>(s)] = gT.at({s, a});
      gUa.data[static_cast<std::size_t>(s)] = gU.at({s, a});
    }
    JetSeries rhs = contract_with(ctx, gTa, 0, U).data[0] + contract_with(ctx, T, 0, gUa).data[0];
    CHECK((lhs - rhs).truncated(2).max_abs_coeff() < 1e-9);
  }
}

TEST_CASE("thomas-d of a weight-0 constant vanishes") {
  ScaleContext ctx = make_scale_context(load("curved_d4.json"));
  TractorTensor f = density_tractor(ctx, JetSeries::constant(3.7, ctx.tab(), ctx.base()), 0.0);
  CHECK(thomas_d(ctx, f).max_abs() < 1e-12);
}

TEST_CASE("thomas-d squares to zero") {
  for (const char* name : {"curved_d4.json", "curved_d5k2.json"}) {
    ScaleContext ctx = make_scale_context(load(name));
    JetSeries val = expr_jet(ctx, "1 + 0.3*sin(x0) + 0.2*x1*x2 - 0.1*x3^2");
    for (double w : {1.5, -0.5}) {
      TractorTensor f = density_tractor(ctx, val, w);
      TractorTensor ddf = thomas_d(ctx, thomas_d(ctx, f));
      TractorTensor tr = contract_h(ctx, ddf, 0, 1);
      double scale = std::max(1.0, ddf.max_abs());
      INFO(name, " w = ", w);
      CHECK(tr.max_abs() / scale < 1e-8);
    }
  }
}

TEST_CASE("hatted thomas-d leibniz failure matches the closed form") {
  ScaleContext ctx = make_scale_context(load("curved_d4.json"));
  JetSeries v1 = expr_jet(ctx, "1 + 0.2*cos(x1) + 0.1*x0*x3");
  JetSeries v2 = expr_jet(ctx, "2 + 0.3*sin(x2) - 0.15*x0^2");
  const double w1 = 1.0, w2 = 0.5;
  TractorTensor f = density_tractor(ctx, v1, w1);
  TractorTensor g = density_tractor(ctx, v2, w2);
  TractorTensor fg = density_tractor(ctx, jet_mul(v1, v2), w1 + w2);

  TractorTensor lhs = hatted_thomas_d(ctx, fg);
  TractorTensor hf = hatted_thomas_d(ctx, f);
  TractorTensor hg = hatted_thomas_d(ctx, g);
  lhs -= hf.scaled(v2);
  lhs -= hg.scaled(v1);

  // rhs: -(2 X / (d + 2(w1+w2) - 2)) (hD f . hD g)
  TractorTensor pair = contract_with(ctx, hf, 0, hg);  // scalar
  TractorTensor rhs =
      x_tractor(ctx).scaled(pair.data[0]).scaled(-2.0 / (ctx.d + 2 * (w1 + w2) - 2));
  lhs -= rhs;
  CHECK(lhs.max_abs() < 1e-7);
}

TEST_CASE("excluded weight is rejected") {
  ScaleContext ctx = make_scale_context(load("curved_d4.json"));
  TractorTensor f =
      density_tractor(ctx, JetSeries::constant(1.0, ctx.tab(), ctx.base()), 1.0 - ctx.d / 2.0);
  CHECK_THROWS_AS(hatted_thomas_d(ctx, f), std::invalid_argument);
}

TEST_CASE("splitting change: round trip and pairing invariance") {
  Scene sc = load("curved_d4.json");
  ScaleContext ctx = make_scale_context(sc, false);
  ScaleContext ctx2 = make_scale_context(sc, true);
  JetSeries om = sc.conformal_factor_jet();
  JetSeries om_inv = jet_reciprocal(om);

  TractorTensor T(ctx, 1, 0, 0.5);
  TractorTensor U(ctx, 1, 0, -1.0);
  for (int s = 0; s < ctx.d + 2; ++s) {
    T.data[static_cast<std::size_t>(s)] = expr_jet(ctx, "0.3 + 0.1*x" + std::to_string(s % ctx.d));
    U.data[static_cast<std::size_t>(s)] = expr_jet(ctx, "0.5 - 0.2*x" + std::to_string((s + 1) % ctx.d));
  }

  TractorTensor T2 = splitting_change(ctx, T, om, ctx2.tag);
  TractorTensor back = splitting_change(ctx2, T2, om_inv, ctx.tag);
  back -= T;
  CHECK(back.max_abs() < 1e-12);

  // h-pairing transforms with total weight
  TractorTensor U2 = splitting_change(ctx, U, om, ctx2.tag);
  TractorTensor p1 = contract_with(ctx, T, 0, U);
  TractorTensor p2 = contract_with(ctx2, T2, 0, U2);
  JetSeries expect = jet_mul(jet_pow(om, T.weight + U.weight), p1.data[0]);
  CHECK((p2.data[0] - expect).max_abs_coeff() < 1e-10);
}

TEST_CASE("canonical tractor: invariant slots and null pairing") {
  Scene sc = load("curved_d4.json");
  ScaleContext ctx = make_scale_context(sc);
  TractorTensor X = x_tractor(ctx);
  TractorTensor XX = contract_with(ctx, X, 0, X);
  CHECK(XX.data[0].max_abs_coeff() == 0.0);

  JetSeries om = sc.conformal_factor_jet();
  TractorTensor X2 = splitting_change(ctx, X, om, "omega2_g");
  // X = (0,0,1) in every splitting up to the representative weight factor
  CHECK(X2.data[0].max_abs_coeff() < 1e-14);
  for (int a = 0; a < ctx.d; ++a) CHECK(X2.data[static_cast<std::size_t>(1 + a)].max_abs_coeff() < 1e-14);
  CHECK((X2.data[static_cast<std::size_t>(ctx.d + 1)] - JetSeries::constant(1.0, ctx.tab(), ctx.base()))
            .max_abs_coeff() < 1e-14);
}

TEST_CASE("densities rescale by omega^w and round trip") {
  Scene sc = load("sphere.json");
  ScaleContext ctx = make_scale_context(sc);
  Density phi{ctx.tag, -1.5, expr_jet(ctx, "1 + 0.2*x0")};
  JetSeries om = sc.conformal_factor_jet();
  Density phi2 = density_to_scale(phi, om, "omega2_g");
  Density back = density_to_scale(phi2, jet_reciprocal(om), ctx.tag);
  CHECK((back.value - phi.value).max_abs_coeff() < 1e-12);
}

TEST_CASE("hypersurface x1 in flat space has unit conformal gram") {
  ScaleContext ctx = make_scale_context(load("flat_plane.json"));
  JetSeries s = JetSeries::variable(1, ctx.tab(), ctx.base());
  ScaleTractorData sd = scale_tractors(ctx, {s});
  JetSeries g = sd.gram[0];
  g -= 1.0;
  CHECK(g.max_abs_coeff() < 1e-13);
}

TEST_CASE("scale tractor restricts to (0, n, -H) on the submanifold") {
  Scene sc = load("circle.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  auto s_bulk = state.st.bulk_s();
  ScaleTractorData sd = scale_tractors(ctx, s_bulk);
  const FrameField& f = *state.st.frame;

  for (int al = 0; al < 2; ++al) {
    TractorTensor Nr = restrict_tractor(sd.N[static_cast<std::size_t>(al)], f);
    // top slot: sigma restricted = 0
    CHECK(Nr.data[0].truncated(4).max_abs_coeff() < 1e-8);
    // middle: n^a
    for (int a = 0; a < 3; ++a) {
      JetSeries diff = Nr.data[static_cast<std::size_t>(1 + a)] - f.normal[static_cast<std::size_t>(al)][static_cast<std::size_t>(a)];
      CHECK(diff.truncated(3).max_abs_coeff() < 1e-8);
    }
  }
  // bottom: -H = -1/r for the radial direction, 0 for zhat
  ExtrinsicData ex = extrinsic_data(f);
  TractorTensor N0 = restrict_tractor(sd.N[0], f);
  TractorTensor N1 = restrict_tractor(sd.N[1], f);
  CHECK(N0.data[static_cast<std::size_t>(4)].value() == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(std::fabs(N1.data[static_cast<std::size_t>(4)].value()) < 1e-8);
  CHECK(ex.H.value_at({0}) == doctest::Approx(1.0));
}

TEST_CASE("conformal gram is scale invariant as a weight-0 object") {
  Scene sc = load("curved_d4.json");
  ConfDefiningState state = conf_state(sc, 2);
  ScaleContext ctx = make_scale_context(sc, false);
  ScaleContext ctx2 = make_scale_context(sc, true);
  JetSeries om = sc.conformal_factor_jet();

  auto s_bulk = state.st.bulk_s();
  std::vector<JetSeries> s2;
  for (const auto& s : s_bulk) s2.push_back(jet_mul(om, s));

  ScaleTractorData g1 = scale_tractors(ctx, s_bulk);
  ScaleTractorData g2 = scale_tractors(ctx2, s2);
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.gram.size(); ++i)
    worst = std::max(worst, (g1.gram[i] - g2.gram[i]).truncated(3).max_abs_coeff());
  CHECK(worst < 1e-8);
}

TEST_CASE("conformal gram restricted to the submanifold is the identity") {
  Scene sc = load("curved_d5k3.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  ScaleTractorData sd = scale_tractors(ctx, state.st.bulk_s());
  const FrameField& f = *state.st.frame;
  const int k = sc.k;
  double worst = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      JetSeries g = f.restrict_to_lambda(sd.gram[static_cast<std::size_t>(a) * k + b]);
      if (a == b) g -= 1.0;
      worst = std::max(worst, g.truncated(3).max_abs_coeff());
    }
  CHECK(worst < 1e-8);
  // and the first-order coefficients of N.N - delta vanish off the
  // submanifold too after the first-order correction
  ObstructionLayout olay(k, 1);
  Tensor F1 = extract_obstruction(*state.st.tub, gram_matrix(state.st), 1);
  double f1 = 0.0;
  for (std::size_t i = 0; i < F1.size(); ++i)
    f1 = std::max(f1, std::fabs(F1.entry_flat(i).value()));
  CHECK(f1 < 1e-9);
}

TEST_CASE("submanifold tractors: B, P and K") {
  Scene sc = load("gauge_torus.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  auto sb = state.st.bulk_s();
  SubmanifoldTractors sub = submanifold_tractors(ctx, sb);
  const FrameField& f = *state.st.frame;
  ExtrinsicData ex = extrinsic_data(f);
  InducedGeometry ig = induced_geometry(f);
  const int k = sc.k, d = sc.d, m = f.lambda_dim();

  // X_A B^A = 0
  for (int i = 0; i < k * k; ++i) {
    TractorTensor xb = contract_with(ctx, sub.B[static_cast<std::size_t>(i)], 0, x_tractor(ctx));
    CHECK(xb.data[0].max_abs_coeff() < 1e-10);
  }

  // D_A B^A = 0 (unhatted divergence; the hatted normalizer is singular at
  // weight -1 in d = 4)
  for (int i : {1}) {
    TractorTensor db = thomas_d(ctx, sub.B[static_cast<std::size_t>(i)]);
    TractorTensor tr = contract_h(ctx, db, 0, 1);
    double scale = std::max(1.0, db.max_abs());
    CHECK(tr.max_abs() / scale < 1e-8);
  }

  // middle slot of B on the submanifold equals beta (raised, tangential)
  double worst = 0.0;
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      TractorTensor Br = restrict_tractor(sub.B[static_cast<std::size_t>(al) * k + be], f);
      for (int a = 0; a < d; ++a) {
        JetSeries expect = f.zero_jet();
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            expect += jet_mul(ig.gbar_inv.at(i, j),
                              jet_mul(ex.beta.at({j, al, be}),
                                      f.tangent[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]));
        worst = std::max(worst,
                         std::fabs(Br.data[static_cast<std::size_t>(1 + a)].value() - expect.value()));
      }
      // top slot vanishes on the submanifold
      TractorTensor BrTop = Br;
      worst = std::max(worst, std::fabs(BrTop.data[0].value()));
    }
  CHECK(worst < 1e-8);

  // K = II0^2 - 2 beta_{b gamma (alpha} beta^b_{beta) gamma}
  Tensor K_res(sub.K.shape(), f.zero_jet());
  JetMap iota = f.embedding_map();
  for (std::size_t i = 0; i < sub.K.size(); ++i)
    K_res.entry_flat(i) = jet_compose(sub.K.entry_flat(i), iota);
  double worst_k = 0.0;
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      JetSeries ii = f.zero_jet();
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c)
            for (int e = 0; e < m; ++e)
              ii += jet_mul(jet_mul(ig.gbar_inv.at(a, c), ig.gbar_inv.at(b, e)),
                            jet_mul(ex.II0.at({a, b, al}), ex.II0.at({c, e, be})));
      JetSeries bb = f.zero_jet();
      for (int g = 0; g < k; ++g)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) {
            JetSeries up = ig.gbar_inv.at(a, b);
            bb += 0.5 * jet_mul(up, jet_mul(ex.beta.at({a, g, al}), ex.beta.at({b, be, g})));
            bb += 0.5 * jet_mul(up, jet_mul(ex.beta.at({a, g, be}), ex.beta.at({b, al, g})));
          }
      JetSeries expect = ii - 2.0 * bb;
      worst_k = std::max(worst_k, std::fabs(K_res.at({al, be}).value() - expect.value()));
    }
  CHECK(worst_k < 1e-7);
}

TEST_CASE("sphere in flat space has vanishing rigidity density") {
  Scene sc = load("sphere.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  SubmanifoldTractors sub = submanifold_tractors(ctx, state.st.bulk_s());
  const FrameField& f = *state.st.frame;
  JetSeries k00 = jet_compose(sub.K.at({0, 0}), f.embedding_map());
  CHECK(std::fabs(k00.value()) < 1e-8);
}

TEST_CASE("p2 on the flat plane annihilates pullback constants") {
  Scene sc = load("flat_plane.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  const double w = 0.5 * (2.0 + sc.k - sc.d);
  TractorTensor f = density_tractor(ctx, JetSeries::constant(2.2, ctx.tab(), ctx.base()), w);
  TractorTensor out = p2_operator(ctx, state.st.bulk_s(), *state.st.frame, f);
  CHECK(std::fabs(out.data[0].value()) < 1e-10);
}

TEST_CASE("p2 is tangential") {
  Scene sc = load("curved_d4.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  auto sb = state.st.bulk_s();
  const double w = 0.5 * (2.0 + sc.k - sc.d);

  JetSeries fv = expr_jet(ctx, "0.7 + 0.3*sin(x1) + 0.2*x0*x2");
  TractorTensor f = density_tractor(ctx, fv, w);
  TractorTensor base = p2_operator(ctx, sb, *state.st.frame, f);

  // modify off the zero locus: f + sigma_gamma h_gamma
  JetSeries mod = fv;
  mod += jet_mul(sb[0], expr_jet(ctx, "0.4 + 0.2*x3"));
  mod += jet_mul(sb[1], expr_jet(ctx, "0.3*cos(x0)"));
  TractorTensor f2 = density_tractor(ctx, mod, w);
  TractorTensor out = p2_operator(ctx, sb, *state.st.frame, f2);
  CHECK(std::fabs(out.data[0].value() - base.data[0].value()) < 1e-7);
}

TEST_CASE("p2 matches its expansion in riemannian terms") {
  Scene sc = load("curved_d5k2.json");
  ConfDefiningState state = conf_state(sc, 1);
  ScaleContext ctx = make_scale_context(sc);
  auto sb = state.st.bulk_s();
  const FrameField& f = *state.st.frame;
  const int d = sc.d, k = sc.k, m = f.lambda_dim();
  const double w = 0.5 * (2.0 + k - d);  // half-integer here

  JetSeries fv = expr_jet(ctx, "0.8 + 0.25*cos(x1) + 0.15*x0*x3 - 0.1*x4^2");
  TractorTensor fd = density_tractor(ctx, fv, w);
  double got = p2_operator(ctx, sb, f, fd).data[0].value();

  // expansion: -k (Delta^T f + c1 (nabla_n rho) f - c1 J f - c2 H.H f)
  // with c1 = (d-k-2)/2 and c2 = (d-k)(d-k-2)/4, everything at the base point
  ExtrinsicData ex = extrinsic_data(f);
  InducedGeometry ig = induced_geometry(f);
  const auto& gamma = ctx.curv.gamma;

  // tangential laplacian = intrinsic laplacian of the pullback
  JetSeries lap_t = f.zero_jet();
  {
    JetSeries fbar = jet_compose(fv, f.embedding_map());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        JetSeries hess = fbar.derivative(i).derivative(j);
        for (int l = 0; l < m; ++l)
          hess -= jet_mul(gamma_at(ig.gammabar, m, l, i, j), fbar.derivative(l));
        lap_t += jet_mul(ig.gbar_inv.at(i, j), hess);
      }
  }

  // nabla_n rho summed over the frame, from the bulk representatives
  JetSeries ndrho = f.zero_jet();
  {
    JetMap iota = f.embedding_map();
    for (int al = 0; al < k; ++al) {
      JetSeries lap = ctx.zero();
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          JetSeries hess = sb[static_cast<std::size_t>(al)].derivative(a).derivative(b);
          for (int c = 0; c < d; ++c)
            hess -= jet_mul(gamma_at(gamma, d, c, a, b), sb[static_cast<std::size_t>(al)].derivative(c));
          lap += jet_mul(ctx.metric.ginv.at(a, b), hess);
        }
      JetSeries rho = -(1.0 / d) * (lap + jet_mul(ctx.curv.jtrace, sb[static_cast<std::size_t>(al)]));
      JetSeries drho = ctx.zero();
      for (int a = 0; a < d; ++a) {
        JetSeries nup = ctx.zero();
        for (int b = 0; b < d; ++b)
          nup += jet_mul(ctx.metric.ginv.at(a, b), sb[static_cast<std::size_t>(al)].derivative(b));
        drho += jet_mul(nup, rho.derivative(a));
      }
      ndrho += jet_compose(drho, iota);
    }
  }

  JetSeries jl = jet_compose(ctx.curv.jtrace, f.embedding_map());
  JetSeries h2 = f.zero_jet();
  for (int al = 0; al < k; ++al) h2 += jet_mul(ex.H.at({al}), ex.H.at({al}));
  JetSeries fl = jet_compose(fv, f.embedding_map());

  const double c1 = 0.5 * (d - k - 2.0);
  const double c2 = 0.25 * (d - k) * (d - k - 2.0);
  double expect = -k * (lap_t.value() + c1 * ndrho.value() * fl.value() -
                        c1 * jl.value() * fl.value() - c2 * h2.value() * fl.value());
  CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("p2 decomposes through its tangential part") {
  for (const char* name : {"curved_d5k2.json", "torus_r4.json"}) {
    Scene sc = load(name);
    ConfDefiningState state = conf_state(sc, 2);
    ScaleContext ctx = make_scale_context(sc);
    auto sb = state.st.bulk_s();
    const FrameField& f = *state.st.frame;
    const int d = sc.d, k = sc.k;
    const double w = 0.5 * (2.0 + k - d);

    JetSeries fv = expr_jet(ctx, "0.6 + 0.2*sin(x0 + x1) + 0.1*x2");
    TractorTensor fd = density_tractor(ctx, fv, w);
    double p2 = p2_operator(ctx, sb, f, fd).data[0].value();
    double p2top = p2_top_operator(ctx, sb, f, fv).value();

    // K_{aa} - F2_{aabb} from the corrected state
    SubmanifoldTractors sub = submanifold_tractors(ctx, sb);
    JetSeries ktr = f.zero_jet();
    for (int al = 0; al < k; ++al)
      ktr += jet_compose(sub.K.at({al, al}), f.embedding_map());
    const Tensor& f2 = state.f2();
    double f2tr = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) f2tr += f2.at({a, a, b, b}).value();

    double fl = jet_compose(fv, f.embedding_map()).value();
    double expect = k * p2top +
                    (k * (k - d + 2.0) / (2.0 * (d - 2.0))) * (ktr.value() - f2tr) * fl;
    INFO(name);
    CHECK(p2 == doctest::Approx(expect).epsilon(1e-7).scale(1.0));
  }
}
