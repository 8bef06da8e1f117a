#include "exhol/jet_map.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace exhol {

JetMap::JetMap(std::vector<JetSeries> components) : components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.table() != components_[0].table() || c.base_point() != components_[0].base_point())
      throw std::invalid_argument("JetMap: components must share table and base point");
  }
}

std::vector<double> JetMap::value() const {
  std::vector<double> v(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) v[i] = components_[i].value();
  return v;
}

namespace {

// Multivariate Horner over the graded coefficient tree of f. `expts` holds
// the exponents already fixed for variables var..m-1.
JetSeries compose_rec(const JetSeries& f, const JetMap& g, const std::vector<JetSeries>& deltas,
                      int var, std::vector<int>& expts, int used, int out_order) {
  const TablePtr& out_table = g.component(0).table();
  const auto& out_base = g.component(0).base_point();
  if (var == 0) {
    return JetSeries::constant(f.coeff(expts), out_table, out_base).with_known_order(out_order);
  }
  int budget = f.capacity_order() - used;
  JetSeries acc = JetSeries::zero(out_table, out_base).with_known_order(out_order);
  for (int j = budget; j >= 0; --j) {
    expts[var - 1] = j;
    JetSeries sub = compose_rec(f, g, deltas, var - 1, expts, used + j, out_order);
    acc = jet_mul(acc, deltas[var - 1]) + sub;
  }
  expts[var - 1] = 0;
  return acc;
}

}  // namespace

JetSeries jet_compose(const JetSeries& f, const JetMap& g) {
  if (g.output_dim() != f.nvars())
    throw std::invalid_argument("jet_compose: dimension mismatch");
  std::vector<JetSeries> deltas;
  deltas.reserve(g.output_dim());
  int order = f.known_order();
  for (int i = 0; i < g.output_dim(); ++i) {
    const JetSeries& gi = g.component(i);
    if (std::fabs(gi.value() - f.base_point()[i]) > 1e-9)
      throw std::invalid_argument("jet_compose: inner map value does not match outer base point");
    JetSeries d = gi;
    d -= gi.value();
    deltas.push_back(d);
    order = std::min(order, gi.known_order());
  }
  std::vector<int> expts(f.nvars(), 0);
  return compose_rec(f, g, deltas, f.nvars(), expts, 0, order);
}

JetMap jet_compose(const JetMap& f, const JetMap& g) {
  std::vector<JetSeries> out;
  out.reserve(f.output_dim());
  for (int i = 0; i < f.output_dim(); ++i) out.push_back(jet_compose(f.component(i), g));
  return JetMap(std::move(out));
}

JetMap jet_map_identity(const TablePtr& table, const std::vector<double>& base) {
  std::vector<JetSeries> comps;
  for (int v = 0; v < table->nvars(); ++v) comps.push_back(JetSeries::variable(v, table, base));
  return JetMap(std::move(comps));
}

JetMap jet_map_inverse(const JetMap& f) {
  const int n = f.input_dim();
  if (f.output_dim() != n)
    throw std::invalid_argument("jet_map_inverse: map must be square");
  const TablePtr& table = f.component(0).table();
  const auto& x_base = f.component(0).base_point();
  const std::vector<double> y_base = f.value();
  const int order = [&] {
    int o = table->order();
    for (int i = 0; i < n; ++i) o = std::min(o, f.component(i).known_order());
    return o;
  }();

  Eigen::MatrixXd jac(n, n);
  std::vector<int> mi(n, 0);
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < n; ++v) {
      mi.assign(n, 0);
      mi[v] = 1;
      jac(i, v) = f.component(i).coeff(mi);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  if (!lu.isInvertible())
    throw std::invalid_argument("jet_map_inverse: singular Jacobian at base point");
  Eigen::MatrixXd jinv = lu.inverse();

  // Split f = y0 + J (x - x0) + h(x) and iterate
  //   g <- x0 + J^{-1} (y - y0 - h(g)),
  // gaining one correct order per pass.
  std::vector<JetSeries> higher;  // h_i as jets in x
  for (int i = 0; i < n; ++i) {
    JetSeries h = f.component(i);
    h -= h.value();
    for (int v = 0; v < n; ++v) {
      JetSeries lin = JetSeries::variable(v, table, x_base);
      lin -= x_base[v];
      h -= jac(i, v) * lin;
    }
    higher.push_back(h.with_known_order(order));
  }

  std::vector<JetSeries> y_vars;
  for (int v = 0; v < n; ++v)
    y_vars.push_back(JetSeries::variable(v, table, y_base).with_known_order(order));

  auto affine_step = [&](const std::vector<JetSeries>& h_of_g) {
    std::vector<JetSeries> g(n);
    for (int i = 0; i < n; ++i) {
      JetSeries acc = JetSeries::constant(x_base[i], table, y_base).with_known_order(order);
      for (int v = 0; v < n; ++v) {
        JetSeries rhs = y_vars[v] - y_base[v] - h_of_g[v];
        acc += jinv(i, v) * rhs;
      }
      g[i] = acc;
    }
    return g;
  };

  std::vector<JetSeries> zero_h(n, JetSeries::zero(table, y_base).with_known_order(order));
  std::vector<JetSeries> g = affine_step(zero_h);
  for (int pass = 0; pass < order; ++pass) {
    JetMap gm(g);
    std::vector<JetSeries> h_of_g(n);
    for (int i = 0; i < n; ++i) h_of_g[i] = jet_compose(higher[i], gm);
    g = affine_step(h_of_g);
  }
  return JetMap(std::move(g));
}

}  // namespace exhol
