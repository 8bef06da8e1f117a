#include <doctest.h>

#include <cmath>
#include <random>

#include "exhol/jet.hpp"
#include "exhol/jet_map.hpp"

using namespace exhol;

namespace {

JetSeries var(int i, const TablePtr& tab, const std::vector<double>& base) {
  return JetSeries::variable(i, tab, base);
}

JetSeries random_poly_jet(std::mt19937& rng, const TablePtr& tab, const std::vector<double>& base,
                          double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  JetSeries j = JetSeries::zero(tab, base);
  for (int p = 0; p < tab->size(); ++p) j.coeff_ref(p) = dist(rng);
  return j;
}

}  // namespace

TEST_CASE("exp jet reproduces the classical series") {
  auto tab = MultiIndexTable::get(1, 3);
  JetSeries x = var(0, tab, {0.0});
  JetSeries e = jet_exp(x);
  CHECK(e.coeff({0}) == doctest::Approx(1.0));
  CHECK(e.coeff({1}) == doctest::Approx(1.0));
  CHECK(e.coeff({2}) == doctest::Approx(0.5));
  CHECK(e.coeff({3}) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("product of coordinates has a single mixed coefficient") {
  auto tab = MultiIndexTable::get(2, 2);
  JetSeries p = var(0, tab, {0.0, 0.0}) * var(1, tab, {0.0, 0.0});
  CHECK(p.coeff({1, 1}) == doctest::Approx(1.0));
  CHECK(p.coeff({0, 0}) == 0.0);
  CHECK(p.coeff({2, 0}) == 0.0);
  CHECK(p.coeff({0, 2}) == 0.0);
}

TEST_CASE("pythagorean identity collapses to the constant jet") {
  auto tab = MultiIndexTable::get(1, 5);
  JetSeries x = var(0, tab, {0.7});
  JetSeries one = jet_sin(x) * jet_sin(x) + jet_cos(x) * jet_cos(x);
  CHECK(one.value() == doctest::Approx(1.0));
  CHECK(one.max_abs_coeff_from(1) < 1e-12);
}

TEST_CASE("jet_eval is exact on polynomials: derivative extraction") {
  std::mt19937 rng(42);
  auto tab = MultiIndexTable::get(3, 4);
  std::vector<double> base = {0.3, -0.4, 1.1};
  JetSeries p = random_poly_jet(rng, tab, base);

  // partial() must reproduce mixed partials of the explicit polynomial.
  // d^3 / dx0 dx1^2, say, of sum c_m (x-b)^m is c_{(1,2,0)} * 1! * 2!.
  CHECK(p.partial({1, 2, 0}) == doctest::Approx(p.coeff({1, 2, 0}) * 2.0));
  CHECK(p.partial({0, 0, 4}) == doctest::Approx(p.coeff({0, 0, 4}) * 24.0));

  // Evaluation matches the polynomial away from base.
  std::vector<double> dx = {0.05, -0.02, 0.03};
  double direct = 0.0;
  for (int pos = 0; pos < tab->size(); ++pos) {
    double term = p.coeff_at(pos);
    const auto& mi = tab->index_at(pos);
    for (int v = 0; v < 3; ++v)
      for (int e = 0; e < mi[v]; ++e) term *= dx[v];
    direct += term;
  }
  CHECK(p.eval(dx) == doctest::Approx(direct));
}

TEST_CASE("division and reciprocal round-trip") {
  auto tab = MultiIndexTable::get(2, 6);
  std::vector<double> base = {0.2, 0.5};
  JetSeries f = 1.0 + var(0, tab, base) * var(1, tab, base) + jet_sin(var(0, tab, base));
  JetSeries g = jet_exp(var(1, tab, base)) + 0.5;
  JetSeries h = (f / g) * g - f;
  CHECK(h.max_abs_coeff() < 1e-12);
}

TEST_CASE("sqrt squares back to the argument") {
  auto tab = MultiIndexTable::get(2, 5);
  std::vector<double> base = {1.0, -0.3};
  JetSeries f = 2.0 + var(0, tab, base) + jet_cos(var(1, tab, base));
  JetSeries r = jet_sqrt(f);
  CHECK((r * r - f).max_abs_coeff() < 1e-12);
}

TEST_CASE("integer and real powers agree on positive bases") {
  auto tab = MultiIndexTable::get(1, 5);
  JetSeries f = 1.5 + var(0, tab, {0.0});
  CHECK((jet_pow(f, 3.0) - f * f * f).max_abs_coeff() < 1e-12);
  JetSeries p = jet_pow(f, 2.5);
  JetSeries q = jet_exp(jet_log(f) * 2.5);
  CHECK((p - q).max_abs_coeff() < 1e-11);
}

TEST_CASE("negative integer power uses the reciprocal") {
  auto tab = MultiIndexTable::get(1, 4);
  JetSeries f = 2.0 + var(0, tab, {0.0});
  JetSeries p = jet_pow(f, -2.0);
  CHECK((p * f * f - 1.0).max_abs_coeff() < 1e-12);
}

TEST_CASE("domain errors surface as exceptions") {
  auto tab = MultiIndexTable::get(1, 3);
  JetSeries z = var(0, tab, {0.0});  // constant term 0
  CHECK_THROWS_AS(jet_log(z), std::domain_error);
  CHECK_THROWS_AS(jet_reciprocal(z), std::domain_error);
  CHECK_THROWS_AS(jet_sqrt(z - 1.0), std::domain_error);
}

TEST_CASE("derivative and antiderivative track known order") {
  auto tab = MultiIndexTable::get(2, 4);
  std::vector<double> base = {0.1, 0.2};
  JetSeries f = jet_exp(var(0, tab, base) + var(1, tab, base));
  CHECK(f.known_order() == 4);
  JetSeries d = f.derivative(0);
  CHECK(d.known_order() == 3);
  CHECK(d.max_abs_coeff_from(4) == 0.0);
  JetSeries back = d.antiderivative(0);
  CHECK(back.known_order() == 4);
  // f and its derivative's antiderivative agree up to functions of x1 only
  JetSeries diff = f - back;
  // every coefficient with x0-exponent > 0 cancels
  for (int p = 0; p < tab->size(); ++p) {
    if (tab->index_at(p)[0] > 0 && tab->degree_at(p) <= 3)
      CHECK(std::fabs(diff.coeff_at(p)) < 1e-13);
  }
}

TEST_CASE("under-provisioned order fails fast") {
  auto tab = MultiIndexTable::get(1, 2);
  JetSeries f = var(0, tab, {0.0});
  JetSeries d2 = f.derivative(0).derivative(0);
  CHECK(d2.known_order() == 0);
  CHECK_THROWS_AS(d2.require_known_order(1, "test"), std::runtime_error);
}

TEST_CASE("composition is associative on random polynomial triples") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    int nv = 2 + static_cast<int>(rng() % 3);  // 2..4 vars
    int order = 3 + static_cast<int>(rng() % 3);  // 3..5
    auto tab = MultiIndexTable::get(nv, order);
    std::vector<double> base_a(nv, 0.0), base_b(nv, 0.0), base_c(nv, 0.0);
    std::uniform_real_distribution<double> dist(-0.4, 0.4);
    for (auto& v : base_a) v = dist(rng);
    for (auto& v : base_b) v = dist(rng);
    for (auto& v : base_c) v = dist(rng);

    // c maps from base_c with values base_b, b maps base_b -> base_a
    auto rand_map = [&](const std::vector<double>& from, const std::vector<double>& to) {
      std::vector<JetSeries> comps;
      for (int i = 0; i < nv; ++i) {
        JetSeries j = random_poly_jet(rng, tab, from, 0.3);
        j -= j.value();
        j += to[i];
        comps.push_back(j);
      }
      return JetMap(comps);
    };
    JetMap cmap = rand_map(base_c, base_b);
    JetMap bmap = rand_map(base_b, base_a);
    JetSeries a = random_poly_jet(rng, tab, base_a);

    JetSeries left = jet_compose(jet_compose(a, bmap), cmap);
    JetSeries right = jet_compose(a, jet_compose(bmap, cmap));
    double scale = std::max(1.0, left.max_abs_coeff());
    CHECK((left - right).max_abs_coeff() / scale < 1e-12);
  }
}
