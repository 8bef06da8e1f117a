#include "exhol/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace exhol {

JetSeries FrameField::dot(const std::vector<JetSeries>& a, const std::vector<JetSeries>& b) const {
  JetSeries acc = zero_jet();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc += jet_mul(g_along.at(i, j), jet_mul(a[i], b[j]));
  return acc;
}

std::vector<JetSeries> FrameField::tangential_cov_deriv(const std::vector<JetSeries>& v,
                                                        int i) const {
  std::vector<JetSeries> out(static_cast<std::size_t>(d), zero_jet());
  for (int a = 0; a < d; ++a) {
    JetSeries acc = v[static_cast<std::size_t>(a)].derivative(i);
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        acc += jet_mul(gamma_at(gamma_along, d, a, b, c),
                       jet_mul(tangent[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)],
                               v[static_cast<std::size_t>(c)]));
    out[static_cast<std::size_t>(a)] = acc;
  }
  return out;
}

namespace {

// Shared construction of the restricted bulk data and tangent frame.
FrameField frame_scaffold(const Scene& scene, bool rescaled) {
  FrameField f;
  f.d = scene.d;
  f.k = scene.k;
  f.scale = scene.scale_tag(rescaled);
  f.base_u = scene.base_u;
  f.embedding = scene.embedding_jets();

  const int m = scene.lambda_dim();
  f.tangent.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    f.tangent[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(scene.d));
    for (int a = 0; a < scene.d; ++a)
      f.tangent[static_cast<std::size_t>(i)].push_back(
          f.embedding[static_cast<std::size_t>(a)].derivative(i));
  }

  MetricJet bulk = scene.metric_jet(rescaled);
  JetMap iota(f.embedding);
  f.g_along = JetMatrix(scene.d, f.zero_jet());
  for (int a = 0; a < scene.d; ++a)
    for (int b = 0; b < scene.d; ++b) f.g_along.at(a, b) = jet_compose(bulk.g.at(a, b), iota);
  f.ginv_along = f.g_along.inverse();

  std::vector<JetSeries> gamma = christoffel(bulk);
  f.gamma_along.resize(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) f.gamma_along[i] = jet_compose(gamma[i], iota);

  f.gbar = JetMatrix(m, f.zero_jet());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      f.gbar.at(i, j) = f.dot(f.tangent[static_cast<std::size_t>(i)],
                              f.tangent[static_cast<std::size_t>(j)]);
  if (std::fabs(f.gbar.determinant().value()) < 1e-12)
    throw std::invalid_argument("scene embedding: d iota is rank deficient at the base point");
  f.gbar_inv = f.gbar.inverse();
  return f;
}

// Project a bulk vector field along the submanifold off the tangent space.
std::vector<JetSeries> project_off_tangent(const FrameField& f, const std::vector<JetSeries>& v) {
  const int m = f.lambda_dim();
  std::vector<JetSeries> covec(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) covec[static_cast<std::size_t>(i)] = f.dot(f.tangent[i], v);
  std::vector<JetSeries> out = v;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      JetSeries c = jet_mul(f.gbar_inv.at(i, j), covec[static_cast<std::size_t>(j)]);
      for (int a = 0; a < f.d; ++a)
        out[static_cast<std::size_t>(a)] -= jet_mul(c, f.tangent[i][static_cast<std::size_t>(a)]);
    }
  return out;
}

}  // namespace

FrameField build_frame(const Scene& scene, bool conformally_rescaled) {
  FrameField f = frame_scaffold(scene, conformally_rescaled);
  const TablePtr& utab = f.utab();

  std::vector<std::vector<JetSeries>> seeds;
  if (!scene.frame_seeds.empty()) {
    for (int r = 0; r < scene.k; ++r) {
      std::vector<JetSeries> s;
      for (int a = 0; a < scene.d; ++a)
        s.push_back(jet_eval(scene.frame_seeds[r][a], scene.base_u, utab));
      seeds.push_back(std::move(s));
    }
  } else {
    // Deterministic default: coordinate axes in index order, keeping those
    // whose normal projection stays independent at the base point.
    for (int axis = 0; axis < scene.d && static_cast<int>(seeds.size()) < scene.k; ++axis) {
      std::vector<JetSeries> s(static_cast<std::size_t>(scene.d), f.zero_jet());
      s[static_cast<std::size_t>(axis)] += 1.0;
      std::vector<JetSeries> res = project_off_tangent(f, s);
      for (const auto& chosen : seeds) {
        JetSeries num = f.dot(chosen, res);
        JetSeries den = f.dot(chosen, chosen);
        JetSeries c = num / den;
        for (int a = 0; a < scene.d; ++a) res[a] -= jet_mul(c, chosen[a]);
      }
      if (f.dot(res, res).value() > 1e-8) seeds.push_back(std::move(s));
    }
    if (static_cast<int>(seeds.size()) < scene.k)
      throw std::invalid_argument("build_frame: could not derive default frame seeds");
  }

  // Two Gram-Schmidt passes: the second sweep scrubs the roundoff the jet
  // function chains leave in the high-degree coefficients.
  std::vector<std::vector<JetSeries>> current = seeds;
  for (int pass = 0; pass < 2; ++pass) {
    f.normal.clear();
    for (int alpha = 0; alpha < scene.k; ++alpha) {
      std::vector<JetSeries> w = project_off_tangent(f, current[static_cast<std::size_t>(alpha)]);
      for (int beta = 0; beta < alpha; ++beta) {
        JetSeries c = f.dot(f.normal[static_cast<std::size_t>(beta)], w);
        for (int a = 0; a < scene.d; ++a)
          w[static_cast<std::size_t>(a)] -=
              jet_mul(c, f.normal[static_cast<std::size_t>(beta)][static_cast<std::size_t>(a)]);
      }
      JetSeries norm2 = f.dot(w, w);
      if (norm2.value() < 1e-10)
        throw std::invalid_argument(
            "build_frame: frame seeds are rank deficient after tangential projection");
      JetSeries inv_norm = jet_reciprocal(jet_sqrt(norm2));
      for (int a = 0; a < scene.d; ++a)
        w[static_cast<std::size_t>(a)] = jet_mul(w[static_cast<std::size_t>(a)], inv_norm);
      f.normal.push_back(std::move(w));
    }
    current = f.normal;
  }
  return f;
}

FrameField apply_gauge(const FrameField& frame, const std::vector<std::vector<JetSeries>>& m) {
  const int k = frame.k;
  if (static_cast<int>(m.size()) != k)
    throw std::invalid_argument("apply_gauge: matrix must be k x k");
  // orthogonality check: m m^T = identity as u-jets
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      JetSeries acc = frame.zero_jet();
      for (int c = 0; c < k; ++c) acc += jet_mul(m[a][c], m[b][c]);
      if (a == b) acc -= 1.0;
      if (acc.max_abs_coeff() > 1e-10)
        throw std::invalid_argument("apply_gauge: matrix field is not orthogonal");
    }

  FrameField out = frame;
  for (int alpha = 0; alpha < k; ++alpha)
    for (int a = 0; a < frame.d; ++a) {
      JetSeries acc = frame.zero_jet();
      for (int beta = 0; beta < k; ++beta)
        acc += jet_mul(m[alpha][beta], frame.normal[static_cast<std::size_t>(beta)][a]);
      out.normal[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(a)] = acc;
    }
  return out;
}

namespace {

// beta_u[alpha][beta] = n_alpha . nabla_u n_beta for a curve frame.
std::vector<std::vector<JetSeries>> curve_beta_matrix(const FrameField& f) {
  const int k = f.k;
  std::vector<std::vector<JetSeries>> beta(
      static_cast<std::size_t>(k),
      std::vector<JetSeries>(static_cast<std::size_t>(k), f.zero_jet()));
  for (int b = 0; b < k; ++b) {
    std::vector<JetSeries> dn = f.tangential_cov_deriv(f.normal[static_cast<std::size_t>(b)], 0);
    for (int a = 0; a < k; ++a)
      beta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          f.dot(f.normal[static_cast<std::size_t>(a)], dn);
  }
  return beta;
}

}  // namespace

FrameField rotation_minimizing_frame(const Scene& scene, bool conformally_rescaled) {
  if (scene.lambda_dim() != 1)
    throw std::invalid_argument(
        "rotation_minimizing_frame: only one-dimensional submanifolds are supported");
  FrameField f = build_frame(scene, conformally_rescaled);
  const int k = f.k;

  std::vector<std::vector<JetSeries>> beta = curve_beta_matrix(f);

  // Solve Q' = -beta_u Q with Q(0) = I by Picard iteration in the u-jet;
  // the rotated frame n' = Q^T n then has vanishing normal fundamental form.
  std::vector<std::vector<JetSeries>> Q(
      static_cast<std::size_t>(k),
      std::vector<JetSeries>(static_cast<std::size_t>(k), f.zero_jet()));
  for (int a = 0; a < k; ++a) Q[a][a] += 1.0;
  const int order = f.utab()->order();
  for (int pass = 0; pass <= order; ++pass) {
    std::vector<std::vector<JetSeries>> next(
        static_cast<std::size_t>(k),
        std::vector<JetSeries>(static_cast<std::size_t>(k), f.zero_jet()));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        JetSeries rhs = f.zero_jet();
        for (int c = 0; c < k; ++c) rhs -= jet_mul(beta[a][c], Q[c][b]);
        next[a][b] = rhs.antiderivative(0);
        if (a == b) next[a][b] += 1.0;
      }
    Q = std::move(next);
  }

  std::vector<std::vector<JetSeries>> m(
      static_cast<std::size_t>(k),
      std::vector<JetSeries>(static_cast<std::size_t>(k), f.zero_jet()));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) m[a][b] = Q[b][a];
  return apply_gauge(f, m);
}

CoulombResult coulomb_gauge_curve(const FrameField& frame) {
  if (frame.lambda_dim() != 1)
    throw std::invalid_argument("coulomb_gauge_curve: requires a curve (d-k == 1)");
  if (frame.k != 2)
    throw std::invalid_argument("coulomb_gauge_curve: parametrized rotations require k == 2");

  // beta reduces to the single 1-form beta_u = beta_{u,1,2}; the Coulomb
  // condition dbar . (beta + dbar theta) = 0 with theta(u0)=theta'(u0)=0 is a
  // double quadrature against the induced volume weight.
  std::vector<std::vector<JetSeries>> beta = curve_beta_matrix(frame);
  JetSeries beta_u = beta[0][1];

  // dbar . omega = (1/sqrt(gbar)) d_u (sqrt(gbar) gbar^{uu} omega_u)
  JetSeries sq = jet_sqrt(frame.gbar.at(0, 0));
  JetSeries div_beta =
      jet_mul(jet_reciprocal(sq), jet_mul(sq, jet_mul(frame.gbar_inv.at(0, 0), beta_u)).derivative(0));

  // Solve dbar . dbar theta = -dbar . beta:
  //   d_u (sqrt(gbar) gbar^{uu} theta') = -sqrt(gbar) dbar . beta
  JetSeries rhs = -jet_mul(sq, div_beta);
  JetSeries flux = rhs.antiderivative(0);  // sqrt(gbar) gbar^{uu} theta'
  JetSeries theta_prime = jet_mul(flux, jet_reciprocal(jet_mul(sq, frame.gbar_inv.at(0, 0))));
  JetSeries theta = theta_prime.antiderivative(0);

  JetSeries c = jet_cos(theta), s = jet_sin(theta);
  std::vector<std::vector<JetSeries>> m = {{c, -s}, {s, c}};
  CoulombResult out{theta, apply_gauge(frame, m)};
  return out;
}

}  // namespace exhol
