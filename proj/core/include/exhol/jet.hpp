#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "exhol/multi_index.hpp"

namespace exhol {

/// Truncated multivariate Taylor expansion of a scalar about a base point.
///
/// Coefficients use the Taylor convention: the entry for a multi-index m is
/// the mixed partial divided by m!. Storage is dense over all multi-indices
/// of total degree <= the table order. Arithmetic truncates at that order.
///
/// Each jet also tracks the order it is actually *known* to (`known_order`):
/// differentiating drops it by one, and mixed-order arithmetic propagates the
/// minimum, so an under-provisioned computation fails fast instead of
/// returning silently wrong high-order coefficients. Coefficients above the
/// known order are kept at zero.
class JetSeries {
 public:
  JetSeries() = default;

  static JetSeries constant(double v, const TablePtr& table, std::vector<double> base);
  /// The coordinate function x_var: value base[var] plus unit linear term.
  static JetSeries variable(int var, const TablePtr& table, std::vector<double> base);
  static JetSeries zero(const TablePtr& table, std::vector<double> base) {
    return constant(0.0, table, std::move(base));
  }

  bool valid() const { return table_ != nullptr; }
  int nvars() const { return table_->nvars(); }
  int capacity_order() const { return table_->order(); }
  int known_order() const { return ord_; }
  const TablePtr& table() const { return table_; }
  const std::vector<double>& base_point() const { return base_; }
  const std::vector<double>& coefficients() const { return c_; }

  double value() const { return c_[0]; }
  double coeff(const std::vector<int>& mi) const;
  double& coeff_ref(int pos) { return c_[pos]; }
  double coeff_at(int pos) const { return c_[pos]; }

  /// Mixed partial derivative value at the base point (coefficient times m!).
  double partial(const std::vector<int>& mi) const;

  /// Polynomial evaluation at base + dx (dx in absolute offset from base).
  double eval(const std::vector<double>& dx) const;

  JetSeries& operator+=(const JetSeries& o);
  JetSeries& operator-=(const JetSeries& o);
  JetSeries& operator+=(double v);
  JetSeries& operator-=(double v);
  JetSeries& operator*=(double v);

  friend JetSeries operator+(JetSeries a, const JetSeries& b) { return a += b; }
  friend JetSeries operator-(JetSeries a, const JetSeries& b) { return a -= b; }
  friend JetSeries operator+(JetSeries a, double b) { return a += b; }
  friend JetSeries operator-(JetSeries a, double b) { return a -= b; }
  friend JetSeries operator+(double a, JetSeries b) { return b += a; }
  friend JetSeries operator-(double a, const JetSeries& b);
  friend JetSeries operator*(JetSeries a, double b) { return a *= b; }
  friend JetSeries operator*(double a, JetSeries b) { return b *= a; }
  friend JetSeries operator*(const JetSeries& a, const JetSeries& b);
  friend JetSeries operator/(const JetSeries& a, const JetSeries& b);
  friend JetSeries operator/(JetSeries a, double b) { return a *= 1.0 / b; }
  friend JetSeries operator-(const JetSeries& a);

  /// d/dx_var; known order drops by one.
  JetSeries derivative(int var) const;
  /// Antiderivative in x_var with zero constant of integration.
  JetSeries antiderivative(int var) const;

  /// Copy with coefficients above `new_known_order` explicitly zeroed (a
  /// clean truncated view).
  JetSeries truncated(int new_known_order) const;
  /// Copy that only adjusts the known-order tag; coefficients are untouched.
  /// Arithmetic uses this: computed coefficients are exact truncated-ring
  /// results and stay available even past the conservatively known order.
  JetSeries with_known_order(int new_known_order) const;

  /// Maximum |coefficient| over all stored (known) coefficients.
  double max_abs_coeff() const;
  /// Maximum |coefficient| over coefficients of total degree >= from_degree.
  double max_abs_coeff_from(int from_degree) const;

  std::string to_string() const;

  void require_known_order(int at_least, const char* what) const;

 private:
  TablePtr table_;
  std::vector<double> base_;
  std::vector<double> c_;
  int ord_ = 0;

  void zero_above_known();
};

JetSeries jet_mul(const JetSeries& a, const JetSeries& b);
JetSeries jet_reciprocal(const JetSeries& a);

/// Compose the univariate Taylor series with coefficients `series_coeffs`
/// (about g's constant term) with g: sum_j series_coeffs[j] * (g - g0)^j.
JetSeries compose_univariate(const std::vector<double>& series_coeffs, const JetSeries& g);

JetSeries jet_sin(const JetSeries& g);
JetSeries jet_cos(const JetSeries& g);
JetSeries jet_tan(const JetSeries& g);
JetSeries jet_exp(const JetSeries& g);
JetSeries jet_log(const JetSeries& g);
JetSeries jet_sqrt(const JetSeries& g);
JetSeries jet_sinh(const JetSeries& g);
JetSeries jet_cosh(const JetSeries& g);
JetSeries jet_pow_int(const JetSeries& g, long long e);
JetSeries jet_pow(const JetSeries& g, double e);

}  // namespace exhol
