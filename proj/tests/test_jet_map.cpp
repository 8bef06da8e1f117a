#include <doctest.h>

#include <random>

#include "exhol/jet_map.hpp"

using namespace exhol;

namespace {

// Independent univariate series reversion: solve the triangular coefficient
// equations for g with g(f(x)) = x, f(x) = sum_{j>=1} a_j x^j, a_1 != 0.
std::vector<double> revert_series(const std::vector<double>& a, int order) {
  std::vector<double> b(static_cast<std::size_t>(order) + 1, 0.0);
  b[1] = 1.0 / a[1];
  // power table: fpow[j][m] = coefficient of x^m in f(x)^j
  std::vector<std::vector<double>> fpow(static_cast<std::size_t>(order) + 1,
                                        std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  fpow[0][0] = 1.0;
  for (int j = 1; j <= order; ++j)
    for (int m = j; m <= order; ++m)
      for (int p = 1; p <= m - j + 1; ++p)
        fpow[j][m] += (p < static_cast<int>(a.size()) ? a[p] : 0.0) * fpow[j - 1][m - p];
  for (int n = 2; n <= order; ++n) {
    double acc = 0.0;
    for (int j = 1; j < n; ++j) acc += b[j] * fpow[j][n];
    b[static_cast<std::size_t>(n)] = -acc / fpow[static_cast<std::size_t>(n)][static_cast<std::size_t>(n)];
  }
  return b;
}

}  // namespace

TEST_CASE("reversion of x + x^2 matches the classical series") {
  auto tab = MultiIndexTable::get(1, 3);
  JetSeries x = JetSeries::variable(0, tab, {0.0});
  JetMap f({x + x * x});
  JetMap g = jet_map_inverse(f);
  CHECK(g.component(0).coeff({1}) == doctest::Approx(1.0));
  CHECK(g.component(0).coeff({2}) == doctest::Approx(-1.0));
  CHECK(g.component(0).coeff({3}) == doctest::Approx(2.0));
}

TEST_CASE("reversion matches the triangular-solve oracle on random series") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  for (int trial = 0; trial < 6; ++trial) {
    const int order = 6;
    auto tab = MultiIndexTable::get(1, order);
    std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
    a[1] = (trial % 2 ? 1.0 : -1.0) * (1.0 + std::fabs(dist(rng)));
    for (int j = 2; j <= order; ++j) a[static_cast<std::size_t>(j)] = dist(rng);

    JetSeries fj = JetSeries::zero(tab, {0.0});
    for (int j = 1; j <= order; ++j) fj.coeff_ref(j) = a[static_cast<std::size_t>(j)];
    JetMap g = jet_map_inverse(JetMap({fj}));

    std::vector<double> oracle = revert_series(a, order);
    for (int j = 1; j <= order; ++j) {
      std::vector<int> mi = {j};
      CHECK(g.component(0).coeff(mi) == doctest::Approx(oracle[static_cast<std::size_t>(j)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("identity map inverts to itself") {
  auto tab = MultiIndexTable::get(3, 4);
  std::vector<double> base = {0.1, -0.2, 0.3};
  JetMap id = jet_map_identity(tab, base);
  JetMap inv = jet_map_inverse(id);
  for (int i = 0; i < 3; ++i)
    CHECK((inv.component(i) - id.component(i)).max_abs_coeff() < 1e-13);
}

TEST_CASE("linear map inverts to the scaled identity") {
  auto tab = MultiIndexTable::get(1, 4);
  JetSeries x = JetSeries::variable(0, tab, {0.0});
  JetMap g = jet_map_inverse(JetMap({2.0 * x}));
  CHECK(g.component(0).coeff({1}) == doctest::Approx(0.5));
  CHECK(g.component(0).max_abs_coeff_from(2) < 1e-14);
}

TEST_CASE("inverse composes to the identity and is an involution") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  const int n = 3, order = 5;
  auto tab = MultiIndexTable::get(n, order);
  std::vector<double> base = {0.2, 0.0, -0.1};

  std::vector<JetSeries> comps;
  for (int i = 0; i < n; ++i) {
    JetSeries j = JetSeries::variable(i, tab, base);
    // perturb with higher-order noise, keeping the Jacobian nonsingular
    for (int p = tab->degree_begin(2); p < tab->size(); ++p) j.coeff_ref(p) += 0.2 * dist(rng);
    for (int v = 0; v < n; ++v) {
      if (v == i) continue;
      JetSeries lin = JetSeries::variable(v, tab, base) - base[v];
      j += dist(rng) * lin;
    }
    comps.push_back(j);
  }
  JetMap f(comps);
  JetMap g = jet_map_inverse(f);

  JetMap gf = jet_compose(g, f);
  JetMap id_x = jet_map_identity(tab, base);
  for (int i = 0; i < n; ++i)
    CHECK((gf.component(i) - id_x.component(i)).max_abs_coeff() < 1e-10);

  JetMap ff = jet_map_inverse(g);
  for (int i = 0; i < n; ++i)
    CHECK((ff.component(i) - f.component(i)).max_abs_coeff() < 1e-10);
}

TEST_CASE("singular Jacobian is rejected") {
  auto tab = MultiIndexTable::get(2, 3);
  std::vector<double> base = {0.0, 0.0};
  JetSeries x = JetSeries::variable(0, tab, base);
  JetSeries y = JetSeries::variable(1, tab, base);
  CHECK_THROWS_AS(jet_map_inverse(JetMap({x + y, x + y})), std::invalid_argument);
}
