#include "exhol/identities.hpp"

#include <stdexcept>

namespace exhol {

namespace {

Tensor compose_entries(const Tensor& bulk, const FrameField& frame) {
  Tensor out(bulk.shape(), frame.zero_jet());
  JetMap iota = frame.embedding_map();
  for (std::size_t i = 0; i < bulk.size(); ++i)
    out.entry_flat(i) = jet_compose(bulk.entry_flat(i), iota);
  return out;
}

}  // namespace

RestrictedCurvature restrict_curvature(const CurvatureStack& cs, const FrameField& frame) {
  RestrictedCurvature rc;
  rc.riemann = compose_entries(cs.riemann, frame);
  rc.weyl = compose_entries(cs.weyl, frame);
  rc.schouten = compose_entries(cs.schouten, frame);
  rc.cotton = compose_entries(cs.cotton, frame);
  rc.jtrace = jet_compose(cs.jtrace, frame.embedding_map());
  return rc;
}

Tensor project_slots(const Tensor& along, const FrameField& frame,
                     const std::vector<int>& pattern) {
  const int r = along.rank();
  if (static_cast<int>(pattern.size()) != r)
    throw std::invalid_argument("project_slots: pattern size mismatch");
  const int m = frame.lambda_dim();
  const int k = frame.k;
  const int d = frame.d;

  for (int s = 0; s < r; ++s)
    if (along.spec(s).kind != IndexKind::bulk || along.spec(s).up)
      throw std::invalid_argument("project_slots: expects all-lower bulk indices");

  // Contract iteratively: slot 0 of `work` is consumed against the legs and
  // the fresh index is rotated to the back, so after r passes the result
  // indices sit in the original order.
  Tensor work = along;
  std::vector<int> widx;
  for (int s = 0; s < r; ++s) {
    std::vector<IndexSpec> nshape;
    nshape.push_back(pattern[s] == 0 ? IndexSpec{IndexKind::tangent, false, m}
                                     : IndexSpec{IndexKind::normal, false, k});
    for (int t = 1; t < work.rank(); ++t) nshape.push_back(work.spec(t));
    Tensor next(nshape, frame.zero_jet());
    widx.assign(static_cast<std::size_t>(work.rank()), 0);
    for (std::size_t flat = 0; flat < next.size(); ++flat) {
      std::vector<int> idx = next.unravel(flat);
      const auto& leg = pattern[s] == 0 ? frame.tangent[static_cast<std::size_t>(idx[0])]
                                        : frame.normal[static_cast<std::size_t>(idx[0])];
      JetSeries acc = frame.zero_jet();
      for (int b = 0; b < d; ++b) {
        widx[0] = b;
        for (int t = 1; t < work.rank(); ++t) widx[static_cast<std::size_t>(t)] = idx[t];
        acc += jet_mul(leg[static_cast<std::size_t>(b)], work.at(widx));
      }
      next.entry_flat(flat) = acc;
    }
    std::vector<int> rot(nshape.size());
    for (std::size_t i = 0; i + 1 < rot.size(); ++i) rot[i] = static_cast<int>(i) + 1;
    rot.back() = 0;
    work = next.permuted(rot);
  }
  return work;
}

IdentityReport classical_identity_residuals(const Scene& scene, const FrameField& frame,
                                            double tolerance) {
  IdentityReport rep;
  const bool rescaled = frame.scale != "g";
  const int m = frame.lambda_dim();
  const int k = frame.k;

  CurvatureStack cs = curvature_stack(scene.metric_jet(rescaled));
  RestrictedCurvature rc = restrict_curvature(cs, frame);
  ExtrinsicData ex = extrinsic_data(frame);
  InducedGeometry ig = induced_geometry(frame);
  InducedCurvature ic = induced_curvature(ig);

  auto value_norm = [](const Tensor& t) {
    double w = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      w = std::max(w, std::fabs(t.entry_flat(i).value()));
    return w;
  };
  auto add = [&](const std::string& name, double residual, const std::string& anchor) {
    Check c;
    c.name = name;
    c.value = residual;
    c.tolerance = tolerance;
    c.pass = std::isfinite(residual) && residual <= tolerance;
    c.anchor = anchor;
    rep.checks.push_back(c);
  };

  // ---- Gauss equation -----------------------------------------------------
  {
    Tensor lhs = project_slots(rc.riemann, frame, {0, 0, 0, 0});
    Tensor rhs = ic.rb.riemann;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int dd = 0; dd < m; ++dd) {
            JetSeries acc = frame.zero_jet();
            for (int al = 0; al < k; ++al) {
              acc += jet_mul(ex.II.at({a, dd, al}), ex.II.at({b, c, al}));
              acc -= jet_mul(ex.II.at({b, dd, al}), ex.II.at({a, c, al}));
            }
            rhs.at({a, b, c, dd}) += acc;
          }
    rhs -= lhs;
    add("gauss", value_norm(rhs), "gauss-equation");
  }

  // ---- Codazzi-Mainardi ---------------------------------------------------
  {
    Tensor lhs = project_slots(rc.riemann, frame, {0, 0, 0, 1});
    Tensor dII = surface_covariant_derivative(ex.II, ig);
    Tensor rhs(lhs.shape(), frame.zero_jet());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int al = 0; al < k; ++al) {
            JetSeries acc = dII.at({a, b, c, al}) - dII.at({b, a, c, al});
            for (int be = 0; be < k; ++be) {
              acc += jet_mul(ex.II.at({c, b, be}), ex.beta.at({a, al, be}));
              acc -= jet_mul(ex.II.at({c, a, be}), ex.beta.at({b, al, be}));
            }
            rhs.at({a, b, c, al}) = acc;
          }
    rhs -= lhs;
    add("codazzi-mainardi", value_norm(rhs), "codazzi-mainardi-equation");
  }

  // ---- Ricci equation -----------------------------------------------------
  {
    Tensor lhs = project_slots(rc.riemann, frame, {0, 0, 1, 1});
    Tensor rhs = ex.ncurv;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int al = 0; al < k; ++al)
          for (int be = 0; be < k; ++be) {
            JetSeries acc = frame.zero_jet();
            for (int c = 0; c < m; ++c)
              for (int e = 0; e < m; ++e) {
                JetSeries up = ig.gbar_inv.at(c, e);
                acc += jet_mul(up, jet_mul(ex.II.at({e, a, be}), ex.II.at({c, b, al})));
                acc -= jet_mul(up, jet_mul(ex.II.at({e, b, be}), ex.II.at({c, a, al})));
              }
            rhs.at({a, b, al, be}) += acc;
          }
    rhs -= lhs;
    add("ricci", value_norm(rhs), "ricci-equation");
  }

  // shared contractions for the traced identities
  const IndexSpec tlo{IndexKind::tangent, false, m};
  Tensor II0_sq_ab({tlo, tlo}, frame.zero_jet());  // II0_(a|c|alpha) II0_b)^c_alpha
  JetSeries II0_sq_trace = frame.zero_jet();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      JetSeries acc = frame.zero_jet();
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e)
          for (int al = 0; al < k; ++al)
            acc += jet_mul(ig.gbar_inv.at(c, e),
                           jet_mul(ex.II0.at({a, c, al}), ex.II0.at({b, e, al})));
      II0_sq_ab.at({a, b}) = acc;
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) II0_sq_trace += jet_mul(ig.gbar_inv.at(a, b), II0_sq_ab.at({a, b}));

  JetSeries H2 = frame.zero_jet();
  for (int al = 0; al < k; ++al) H2 += jet_mul(ex.H.at({al}), ex.H.at({al}));

  Tensor W_nt = project_slots(rc.weyl, frame, {1, 0, 0, 1});  // W_alpha a b beta
  Tensor P_tt = project_slots(rc.schouten, frame, {0, 0});
  Tensor P_tn = project_slots(rc.schouten, frame, {0, 1});
  Tensor P_nn = project_slots(rc.schouten, frame, {1, 1});

  JetSeries W_abba = frame.zero_jet();  // W_alpha beta beta alpha
  {
    Tensor W_nnnn = project_slots(rc.weyl, frame, {1, 1, 1, 1});
    for (int al = 0; al < k; ++al)
      for (int be = 0; be < k; ++be) W_abba += W_nnnn.at({al, be, be, al});
  }

  // ---- Fialkow-Gauss --------------------------------------------------------
  if (m >= 2) {
    Tensor lhs({tlo, tlo}, frame.zero_jet());
    if (m > 2) {
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          JetSeries acc = P_tt.at({a, b}) - ic.schouten.at({a, b});
          for (int al = 0; al < k; ++al) acc += jet_mul(ex.H.at({al}), ex.II0.at({a, b, al}));
          acc += 0.5 * jet_mul(ig.gbar.at(a, b), H2);
          lhs.at({a, b}) = acc * double(m - 2);
        }
    }
    Tensor rhs({tlo, tlo}, frame.zero_jet());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        JetSeries acc = II0_sq_ab.at({a, b});
        for (int al = 0; al < k; ++al) acc -= W_nt.at({al, a, b, al});
        acc -= (0.5 / (m - 1)) * jet_mul(ig.gbar.at(a, b), II0_sq_trace + W_abba);
        rhs.at({a, b}) = acc;
      }
    rhs -= lhs;
    add("fialkow-gauss", value_norm(rhs), "fialkow-gauss-equation");
  } else {
    rep.notes.push_back("fialkow-gauss skipped: requires dim(submanifold) >= 2");
  }

  // ---- theorema egregium (generalized) --------------------------------------
  if (m > 2) {
    JetSeries P_trace = frame.zero_jet();
    for (int al = 0; al < k; ++al) P_trace += P_nn.at({al, al});
    JetSeries gW = frame.zero_jet();  // gbar^{cd} W_alpha c d alpha
    for (int c = 0; c < m; ++c)
      for (int e = 0; e < m; ++e)
        for (int al = 0; al < k; ++al)
          gW += jet_mul(ig.gbar_inv.at(c, e), W_nt.at({al, c, e, al}));
    JetSeries lhs = rc.jtrace - P_trace;
    JetSeries rhs = ic.jtrace - 0.5 * double(m) * H2 + (0.5 / (m - 1)) * (II0_sq_trace - gW);
    add("theorema-egregium", std::fabs((lhs - rhs).value()), "theorema-egregium");
  } else {
    rep.notes.push_back("theorema-egregium skipped: requires dim(submanifold) > 2");
  }

  // ---- traced Codazzi -------------------------------------------------------
  if (m >= 2) {
    Tensor dII0 = surface_covariant_derivative(ex.II0, ig);
    Tensor dH = surface_covariant_derivative(ex.H, ig);
    Tensor W_nnnt = project_slots(rc.weyl, frame, {1, 1, 1, 0});  // W_gamma beta gamma b
    double worst = 0.0;
    for (int a = 0; a < m; ++a)
      for (int be = 0; be < k; ++be) {
        JetSeries lhs = P_tn.at({a, be}) * double(m - 1);
        JetSeries rhs = frame.zero_jet();
        for (int c = 0; c < m; ++c)
          for (int e = 0; e < m; ++e)
            rhs += jet_mul(ig.gbar_inv.at(c, e), dII0.at({c, e, a, be}));
        rhs -= double(m - 1) * dH.at({a, be});
        for (int al = 0; al < k; ++al)
          rhs -= double(m - 1) * jet_mul(ex.beta.at({a, be, al}), ex.H.at({al}));
        for (int c = 0; c < m; ++c)
          for (int e = 0; e < m; ++e)
            for (int al = 0; al < k; ++al)
              rhs += jet_mul(ig.gbar_inv.at(c, e),
                             jet_mul(ex.II0.at({e, a, al}), ex.beta.at({c, be, al})));
        for (int ga = 0; ga < k; ++ga) rhs += W_nnnt.at({ga, be, ga, a});
        worst = std::max(worst, std::fabs((lhs - rhs).value()));
      }
    add("traced-codazzi", worst, "traced-codazzi-mainardi");
  } else {
    rep.notes.push_back("traced-codazzi skipped: requires dim(submanifold) >= 2");
  }

  // ---- trace-free Codazzi ----------------------------------------------------
  if (m >= 2) {
    Tensor W_ttta = project_slots(rc.weyl, frame, {0, 0, 0, 1});
    Tensor W_nnnt = project_slots(rc.weyl, frame, {1, 1, 1, 0});
    Tensor dII0 = surface_covariant_derivative(ex.II0, ig);
    const IndexSpec nor{IndexKind::normal, false, k};
    Tensor divII0({tlo, nor}, frame.zero_jet());
    for (int b = 0; b < m; ++b)
      for (int al = 0; al < k; ++al) {
        JetSeries acc = frame.zero_jet();
        for (int c = 0; c < m; ++c)
          for (int e = 0; e < m; ++e)
            acc += jet_mul(ig.gbar_inv.at(c, e), dII0.at({c, e, b, al}));
        divII0.at({b, al}) = acc;
      }
    Tensor II0beta({tlo, nor}, frame.zero_jet());
    for (int b = 0; b < m; ++b)
      for (int al = 0; al < k; ++al) {
        JetSeries acc = frame.zero_jet();
        for (int c = 0; c < m; ++c)
          for (int e = 0; e < m; ++e)
            for (int be = 0; be < k; ++be)
              acc += jet_mul(ig.gbar_inv.at(c, e),
                             jet_mul(ex.II0.at({b, c, be}), ex.beta.at({e, al, be})));
        II0beta.at({b, al}) = acc;
      }

    double worst = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int al = 0; al < k; ++al) {
            JetSeries lhs = W_ttta.at({a, b, c, al});
            JetSeries wtr_a = frame.zero_jet(), wtr_b = frame.zero_jet();
            for (int be = 0; be < k; ++be) {
              wtr_a += W_nnnt.at({be, al, be, a});
              wtr_b += W_nnnt.at({be, al, be, b});
            }
            lhs -= (1.0 / (m - 1)) *
                   (jet_mul(wtr_a, ig.gbar.at(b, c)) - jet_mul(wtr_b, ig.gbar.at(a, c)));

            JetSeries rhs = dII0.at({a, b, c, al}) - dII0.at({b, a, c, al});
            for (int be = 0; be < k; ++be) {
              rhs += jet_mul(ex.beta.at({a, al, be}), ex.II0.at({b, c, be}));
              rhs -= jet_mul(ex.beta.at({b, al, be}), ex.II0.at({a, c, be}));
            }
            rhs -= (1.0 / (m - 1)) *
                   (jet_mul(ig.gbar.at(c, a), divII0.at({b, al}) + II0beta.at({b, al})) -
                    jet_mul(ig.gbar.at(c, b), divII0.at({a, al}) + II0beta.at({a, al})));
            worst = std::max(worst, std::fabs((lhs - rhs).value()));
          }
    add("trace-free-codazzi", worst, "trace-free-codazzi-mainardi");
  } else {
    rep.notes.push_back("trace-free-codazzi skipped: requires dim(submanifold) >= 2");
  }

  return rep;
}

}  // namespace exhol
