#include "exhol/jet.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace exhol {

namespace {

void check_same_context(const JetSeries& a, const JetSeries& b) {
  if (a.table() != b.table())
    throw std::invalid_argument("jet arithmetic: mismatched tables");
  if (a.base_point() != b.base_point())
    throw std::invalid_argument("jet arithmetic: mismatched base points");
}

}  // namespace

JetSeries JetSeries::constant(double v, const TablePtr& table, std::vector<double> base) {
  JetSeries j;
  j.table_ = table;
  j.base_ = std::move(base);
  j.c_.assign(table->size(), 0.0);
  j.c_[0] = v;
  j.ord_ = table->order();
  return j;
}

JetSeries JetSeries::variable(int var, const TablePtr& table, std::vector<double> base) {
  if (var < 0 || var >= table->nvars())
    throw std::invalid_argument("JetSeries::variable: index out of range");
  const double value = base[static_cast<std::size_t>(var)];
  JetSeries j = constant(value, table, std::move(base));
  if (table->order() >= 1) {
    std::vector<int> mi(table->nvars(), 0);
    mi[var] = 1;
    j.c_[table->position(mi)] = 1.0;
  }
  return j;
}

double JetSeries::coeff(const std::vector<int>& mi) const {
  int pos = table_->position(mi);
  return pos < 0 ? 0.0 : c_[pos];
}

double JetSeries::partial(const std::vector<int>& mi) const {
  double fact = 1.0;
  for (int e : mi)
    for (int i = 2; i <= e; ++i) fact *= i;
  return coeff(mi) * fact;
}

double JetSeries::eval(const std::vector<double>& dx) const {
  double sum = 0.0;
  for (int p = table_->size() - 1; p >= 0; --p) {
    if (c_[p] == 0.0) continue;
    double term = c_[p];
    const auto& mi = table_->index_at(p);
    for (int v = 0; v < nvars(); ++v)
      for (int e = 0; e < mi[v]; ++e) term *= dx[v];
    sum += term;
  }
  return sum;
}

void JetSeries::zero_above_known() {
  if (ord_ >= table_->order()) return;
  for (int p = table_->degree_begin(ord_ + 1); p < table_->size(); ++p) c_[p] = 0.0;
}

JetSeries& JetSeries::operator+=(const JetSeries& o) {
  check_same_context(*this, o);
  for (int p = 0; p < table_->size(); ++p) c_[p] += o.c_[p];
  ord_ = std::min(ord_, o.ord_);
  return *this;
}

JetSeries& JetSeries::operator-=(const JetSeries& o) {
  check_same_context(*this, o);
  for (int p = 0; p < table_->size(); ++p) c_[p] -= o.c_[p];
  ord_ = std::min(ord_, o.ord_);
  return *this;
}

JetSeries& JetSeries::operator+=(double v) {
  c_[0] += v;
  return *this;
}

JetSeries& JetSeries::operator-=(double v) {
  c_[0] -= v;
  return *this;
}

JetSeries& JetSeries::operator*=(double v) {
  for (double& x : c_) x *= v;
  return *this;
}

JetSeries operator-(const JetSeries& a) {
  JetSeries r = a;
  for (double& x : r.c_) x = -x;
  return r;
}

JetSeries operator-(double a, const JetSeries& b) {
  JetSeries r = -b;
  r.c_[0] += a;
  return r;
}

JetSeries jet_mul(const JetSeries& a, const JetSeries& b) {
  JetSeries r = JetSeries::zero(a.table(), a.base_point());
  const auto& tab = *a.table();
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  for (const auto& pe : tab.products()) {
    double va = ca[pe.lhs];
    if (va == 0.0) continue;
    r.coeff_ref(pe.out) += va * cb[pe.rhs];
  }
  return r.with_known_order(std::min(a.known_order(), b.known_order()));
}

JetSeries operator*(const JetSeries& a, const JetSeries& b) {
  check_same_context(a, b);
  return jet_mul(a, b);
}

JetSeries operator/(const JetSeries& a, const JetSeries& b) {
  check_same_context(a, b);
  return jet_mul(a, jet_reciprocal(b));
}

JetSeries JetSeries::derivative(int var) const {
  JetSeries r = zero(table_, base_);
  const auto& tab = *table_;
  for (int p = 0; p < tab.size(); ++p) {
    int q = tab.shift_up(p, var);
    if (q < 0) continue;
    r.c_[p] = c_[q] * (tab.index_at(q)[var]);
  }
  r.ord_ = std::max(0, ord_ - 1);
  return r;
}

JetSeries JetSeries::antiderivative(int var) const {
  JetSeries r = zero(table_, base_);
  const auto& tab = *table_;
  for (int p = 0; p < tab.size(); ++p) {
    int q = tab.shift_up(p, var);
    if (q < 0) continue;
    r.c_[q] = c_[p] / (tab.index_at(q)[var]);
  }
  r.ord_ = std::min(ord_ + 1, tab.order());
  return r;
}

JetSeries JetSeries::truncated(int new_known_order) const {
  JetSeries r = *this;
  r.ord_ = std::min(new_known_order, table_->order());
  r.zero_above_known();
  return r;
}

JetSeries JetSeries::with_known_order(int new_known_order) const {
  JetSeries r = *this;
  r.ord_ = std::max(0, std::min(new_known_order, table_->order()));
  return r;
}

double JetSeries::max_abs_coeff() const {
  double m = 0.0;
  const int end = table_->degree_end(ord_);
  for (int p = 0; p < end; ++p) m = std::max(m, std::fabs(c_[p]));
  return m;
}

double JetSeries::max_abs_coeff_from(int from_degree) const {
  double m = 0.0;
  const int end = table_->degree_end(ord_);
  for (int p = table_->degree_begin(std::min(from_degree, table_->order())); p < end; ++p)
    m = std::max(m, std::fabs(c_[p]));
  return m;
}

void JetSeries::require_known_order(int at_least, const char* what) const {
  if (ord_ < at_least) {
    std::ostringstream os;
    os << what << ": requires jet order >= " << at_least << " but only " << ord_
       << " is available; raise the jet_order of the scene";
    throw std::runtime_error(os.str());
  }
}

std::string JetSeries::to_string() const {
  std::ostringstream os;
  os << "jet(";
  bool first = true;
  for (int p = 0; p < table_->size(); ++p) {
    if (c_[p] == 0.0 && p != 0) continue;
    if (!first) os << " + ";
    first = false;
    os << c_[p];
    const auto& mi = table_->index_at(p);
    for (int v = 0; v < nvars(); ++v)
      if (mi[v] > 0) os << " x" << v << "^" << mi[v];
  }
  os << ")";
  return os.str();
}

JetSeries compose_univariate(const std::vector<double>& series_coeffs, const JetSeries& g) {
  JetSeries delta = g;
  delta -= g.value();
  JetSeries acc = JetSeries::constant(series_coeffs.empty() ? 0.0 : series_coeffs.back(),
                                      g.table(), g.base_point());
  acc = acc.with_known_order(g.known_order());
  for (int j = static_cast<int>(series_coeffs.size()) - 2; j >= 0; --j) {
    acc = jet_mul(acc, delta);
    acc += series_coeffs[j];
  }
  return acc;
}

JetSeries jet_reciprocal(const JetSeries& a) {
  double a0 = a.value();
  if (a0 == 0.0)
    throw std::domain_error("jet division: zero constant term in denominator");
  int n = a.known_order();
  std::vector<double> s(n + 1);
  double p = 1.0 / a0;
  for (int j = 0; j <= n; ++j) {
    s[j] = p;
    p *= -1.0 / a0;
  }
  return compose_univariate(s, a);
}

JetSeries jet_exp(const JetSeries& g) {
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double e = std::exp(g.value());
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    s[j] = e / fact;
    fact *= (j + 1);
  }
  return compose_univariate(s, g);
}

JetSeries jet_log(const JetSeries& g) {
  double g0 = g.value();
  if (g0 <= 0.0) throw std::domain_error("log: nonpositive constant term");
  int n = g.known_order();
  std::vector<double> s(n + 1);
  s[0] = std::log(g0);
  double p = 1.0 / g0;
  for (int j = 1; j <= n; ++j) {
    s[j] = (j % 2 == 1 ? 1.0 : -1.0) * p / j;
    p /= g0;
  }
  return compose_univariate(s, g);
}

JetSeries jet_sqrt(const JetSeries& g) {
  double g0 = g.value();
  if (g0 <= 0.0) throw std::domain_error("sqrt: nonpositive constant term");
  return jet_pow(g, 0.5);
}

JetSeries jet_pow(const JetSeries& g, double e) {
  double r = std::round(e);
  if (std::fabs(e - r) < 1e-14 && std::fabs(r) < 64)
    return jet_pow_int(g, static_cast<long long>(r));
  double g0 = g.value();
  if (g0 <= 0.0)
    throw std::domain_error("pow: non-integer exponent requires positive base constant term");
  // Binomial series about g0.
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double coeff = std::pow(g0, e);
  for (int j = 0; j <= n; ++j) {
    s[j] = coeff;
    coeff *= (e - j) / (j + 1) / g0;
  }
  return compose_univariate(s, g);
}

JetSeries jet_pow_int(const JetSeries& g, long long e) {
  if (e < 0) return jet_reciprocal(jet_pow_int(g, -e));
  JetSeries acc = JetSeries::constant(1.0, g.table(), g.base_point()).truncated(g.known_order());
  JetSeries base = g;
  while (e > 0) {
    if (e & 1) acc = jet_mul(acc, base);
    e >>= 1;
    if (e) base = jet_mul(base, base);
  }
  return acc;
}

JetSeries jet_sin(const JetSeries& g) {
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double sv = std::sin(g.value()), cv = std::cos(g.value());
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    double deriv;
    switch (j % 4) {
      case 0: deriv = sv; break;
      case 1: deriv = cv; break;
      case 2: deriv = -sv; break;
      default: deriv = -cv; break;
    }
    s[j] = deriv / fact;
    fact *= (j + 1);
  }
  return compose_univariate(s, g);
}

JetSeries jet_cos(const JetSeries& g) {
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double sv = std::sin(g.value()), cv = std::cos(g.value());
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    double deriv;
    switch (j % 4) {
      case 0: deriv = cv; break;
      case 1: deriv = -sv; break;
      case 2: deriv = -cv; break;
      default: deriv = sv; break;
    }
    s[j] = deriv / fact;
    fact *= (j + 1);
  }
  return compose_univariate(s, g);
}

JetSeries jet_tan(const JetSeries& g) { return jet_sin(g) / jet_cos(g); }

JetSeries jet_sinh(const JetSeries& g) {
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double sv = std::sinh(g.value()), cv = std::cosh(g.value());
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    s[j] = (j % 2 == 0 ? sv : cv) / fact;
    fact *= (j + 1);
  }
  return compose_univariate(s, g);
}

JetSeries jet_cosh(const JetSeries& g) {
  int n = g.known_order();
  std::vector<double> s(n + 1);
  double sv = std::sinh(g.value()), cv = std::cosh(g.value());
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    s[j] = (j % 2 == 0 ? cv : sv) / fact;
    fact *= (j + 1);
  }
  return compose_univariate(s, g);
}

}  // namespace exhol
