#include "exhol/metric.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace exhol {

JetMatrix::JetMatrix(int dim, const JetSeries& proto) : dim_(dim) {
  m_.assign(static_cast<std::size_t>(dim) * dim,
            JetSeries::zero(proto.table(), proto.base_point()).truncated(proto.known_order()));
}

JetMatrix JetMatrix::inverse() const {
  const int n = dim_;
  JetMatrix a = *this;
  JetMatrix inv(n, m_[0]);
  for (int i = 0; i < n; ++i) inv.at(i, i) += 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    double best = 0.0;
    for (int r = col; r < n; ++r) {
      double v = std::fabs(a.at(r, col).value());
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (pivot < 0 || best == 0.0)
      throw std::invalid_argument("JetMatrix::inverse: singular at base point");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a.at(pivot, c), a.at(col, c));
        std::swap(inv.at(pivot, c), inv.at(col, c));
      }
    }
    JetSeries pr = jet_reciprocal(a.at(col, col));
    for (int c = 0; c < n; ++c) {
      a.at(col, c) = jet_mul(a.at(col, c), pr);
      inv.at(col, c) = jet_mul(inv.at(col, c), pr);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      JetSeries f = a.at(r, col);
      if (f.max_abs_coeff() == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a.at(r, c) -= jet_mul(f, a.at(col, c));
        inv.at(r, c) -= jet_mul(f, inv.at(col, c));
      }
    }
  }
  return inv;
}

JetSeries JetMatrix::determinant() const {
  // LU with jet entries, pivoting by constant-term magnitude.
  const int n = dim_;
  JetMatrix a = *this;
  JetSeries det = JetSeries::constant(1.0, m_[0].table(), m_[0].base_point());
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    double best = 0.0;
    for (int r = col; r < n; ++r) {
      double v = std::fabs(a.at(r, col).value());
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (pivot < 0 || best == 0.0)
      return JetSeries::zero(m_[0].table(), m_[0].base_point());
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
      det *= -1.0;
    }
    det = jet_mul(det, a.at(col, col));
    JetSeries pr = jet_reciprocal(a.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      JetSeries f = jet_mul(a.at(r, col), pr);
      if (f.max_abs_coeff() == 0.0) continue;
      for (int c = col; c < n; ++c) a.at(r, c) -= jet_mul(f, a.at(col, c));
    }
  }
  return det;
}

MetricJet MetricJet::from_components(JetMatrix components) {
  MetricJet m;
  m.dim = components.dim();
  const int n = m.dim;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      JetSeries diff = components.at(i, j) - components.at(j, i);
      if (diff.max_abs_coeff() > 1e-10)
        throw std::invalid_argument("metric components are not symmetric");
    }
  Eigen::MatrixXd g0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g0(i, j) = components.at(i, j).value();
  Eigen::LLT<Eigen::MatrixXd> llt(g0);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("metric is not positive definite at the base point");
  m.g = std::move(components);
  m.ginv = m.g.inverse();
  return m;
}

MetricJet MetricJet::from_expressions(const std::vector<std::vector<ExprAst>>& comps,
                                      const std::vector<double>& base, const TablePtr& table) {
  const int n = static_cast<int>(comps.size());
  JetMatrix g(n, JetSeries::zero(table, base));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = jet_eval(comps[i][j], base, table);
  return from_components(std::move(g));
}

std::vector<JetSeries> christoffel(const MetricJet& m) {
  const int n = m.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.g.at(i, j).require_known_order(1, "christoffel");

  // dg[c][a][b] = partial_c g_ab
  std::vector<JetSeries> dg(static_cast<std::size_t>(n) * n * n);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        dg[(static_cast<std::size_t>(c) * n + a) * n + b] = m.g.at(a, b).derivative(c);

  auto dG = [&](int c, int a, int b) -> const JetSeries& {
    return dg[(static_cast<std::size_t>(c) * n + a) * n + b];
  };

  std::vector<JetSeries> gamma(static_cast<std::size_t>(n) * n * n,
                               JetSeries::zero(m.table(), m.base()));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        JetSeries acc = JetSeries::zero(m.table(), m.base());
        for (int e = 0; e < n; ++e) {
          JetSeries sym = dG(b, e, c) + dG(c, e, b) - dG(e, b, c);
          acc += jet_mul(m.ginv.at(a, e), sym);
        }
        acc *= 0.5;
        gamma[(static_cast<std::size_t>(a) * n + b) * n + c] = acc;
        gamma[(static_cast<std::size_t>(a) * n + c) * n + b] = acc;
      }
  return gamma;
}

Tensor covariant_derivative(const Tensor& t, const std::vector<JetSeries>& gamma, int dim) {
  std::vector<IndexSpec> shape;
  shape.push_back({IndexKind::bulk, false, dim});
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
      if (t.spec(pos).kind != IndexKind::bulk)
        throw std::invalid_argument("covariant_derivative: only bulk indices supported");
      const int b = tidx[static_cast<std::size_t>(pos)];
      std::vector<int> src = tidx;
      for (int c = 0; c < dim; ++c) {
        src[static_cast<std::size_t>(pos)] = c;
        if (t.spec(pos).up)
          acc += jet_mul(gamma_at(gamma, dim, b, a, c), t.at(src));
        else
          acc -= jet_mul(gamma_at(gamma, dim, c, a, b), t.at(src));
      }
    }
    r.entry_flat(flat) = acc;
  }
  return r;
}

}  // namespace exhol
