#include <doctest.h>

#include <random>

#include "exhol/least_squares.hpp"
#include "exhol/projectors.hpp"

using namespace exhol;

namespace {

TablePtr scalar_table() { return MultiIndexTable::get(0, 0); }
JetSeries num(double v) { return JetSeries::constant(v, scalar_table(), {}); }

// Flatten conventions for a synthetic first-order system: F is indexed by
// (alpha<=beta, gamma), A by (alpha, gamma1<=gamma2).
struct FirstOrderSpace {
  int k;
  SymTuples pairs, spairs;
  FirstOrderSpace(int k_) : k(k_), pairs(k_, 2), spairs(k_, 2) {}
  int f_dim() const { return pairs.count() * k; }
  int a_dim() const { return k * spairs.count(); }
  int f_index(int a, int b, int g) const { return pairs.rank({a, b}) * k + g; }
  int a_index(int a, int g1, int g2) const { return a * spairs.count() + spairs.rank({g1, g2}); }
};

// The first-order update rule Delta F_{ab g} = 4 A_{(ab) g} (A symmetric in
// its last two slots), assembled as an explicit matrix. This mimics what the
// geometry probes measure in the Riemannian construction.
UpdateMatrix first_order_update(const FirstOrderSpace& sp) {
  UpdateMatrix U(sp.f_dim(), sp.a_dim());
  for (int a = 0; a < sp.k; ++a)
    for (int b = a; b < sp.k; ++b)
      for (int g = 0; g < sp.k; ++g) {
        // 4 A_{(ab)g} = 2 (A_{a (b g)'} + A_{b (a g)'}) on symmetric-store A
        U.at(sp.f_index(a, b, g), sp.a_index(a, std::min(b, g), std::max(b, g))) += 2.0;
        U.at(sp.f_index(a, b, g), sp.a_index(b, std::min(a, g), std::max(a, g))) += 2.0;
      }
  return U;
}

}  // namespace

TEST_CASE("first-order rule removes a random obstruction completely") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k : {2, 3, 4}) {
    FirstOrderSpace sp(k);
    UpdateMatrix U = first_order_update(sp);

    // random F, symmetric in (alpha beta) by storage
    std::vector<double> fvals(static_cast<std::size_t>(sp.f_dim()));
    for (auto& v : fvals) v = dist(rng);
    std::vector<JetSeries> F;
    for (double v : fvals) F.push_back(num(v));

    RemoveResult rr = remove_correctable(F, U);
    CHECK(rr.rank == sp.a_dim());
    CHECK(rr.residual_norm < 1e-12);

    // A matches -(1/4)(F_abg + F_gab - F_bga)
    for (int a = 0; a < k; ++a)
      for (int g1 = 0; g1 < k; ++g1)
        for (int g2 = g1; g2 < k; ++g2) {
          double f1 = fvals[static_cast<std::size_t>(sp.f_index(std::min(a, g2), std::max(a, g2), g1))];
          double f2 = fvals[static_cast<std::size_t>(sp.f_index(std::min(g1, a), std::max(g1, a), g2))];
          double f3 = fvals[static_cast<std::size_t>(sp.f_index(std::min(g1, g2), std::max(g1, g2), a))];
          // formula with (alpha beta gamma) = (a, g1, g2): -(1/4)(F_{a g1 g2} + F_{g2 a g1} - F_{g1 g2 a})
          double expect = -0.25 * (f2 + f1 - f3);
          CHECK(rr.A[static_cast<std::size_t>(sp.a_index(a, g1, g2))].value() ==
                doctest::Approx(expect).epsilon(1e-10));
        }
  }
}

TEST_CASE("residual is orthogonal to the range of the update map") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  // a deliberately rank-deficient rectangular map
  UpdateMatrix U(6, 4);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 6; ++r) U.at(r, c) = dist(rng);
  for (int r = 0; r < 6; ++r) U.at(r, 3) = U.at(r, 0) + U.at(r, 1);  // dependent column

  std::vector<JetSeries> F;
  for (int r = 0; r < 6; ++r) F.push_back(num(dist(rng)));
  RemoveResult rr = remove_correctable(F, U);
  CHECK(rr.rank == 3);

  for (int c = 0; c < 4; ++c) {
    double dot = 0.0;
    for (int r = 0; r < 6; ++r) dot += U.at(r, c) * rr.residual[static_cast<std::size_t>(r)].value();
    CHECK(std::fabs(dot) < 1e-10);
  }

  auto null = update_null_space(U);
  CHECK(null.size() == 1);
  // minimum-norm solution is orthogonal to the null space
  double dot = 0.0;
  for (int c = 0; c < 4; ++c) dot += null[0][static_cast<std::size_t>(c)] * rr.A[static_cast<std::size_t>(c)].value();
  CHECK(std::fabs(dot) < 1e-10);
}

TEST_CASE("input already outside the range is returned untouched") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  // U maps onto the first two coordinates only
  UpdateMatrix U(4, 2);
  U.at(0, 0) = 1.0;
  U.at(1, 1) = 1.0;
  std::vector<JetSeries> F = {num(0.0), num(0.0), num(dist(rng)), num(dist(rng))};
  RemoveResult rr = remove_correctable(F, U);
  CHECK(rr.A[0].value() == doctest::Approx(0.0));
  CHECK(rr.A[1].value() == doctest::Approx(0.0));
  CHECK(rr.residual[2].value() == doctest::Approx(F[2].value()));
  CHECK(rr.residual[3].value() == doctest::Approx(F[3].value()));
}

TEST_CASE("jet-valued systems are solved coefficient-wise") {
  auto tab = MultiIndexTable::get(2, 3);
  std::vector<double> base = {0.1, 0.2};
  JetSeries x = JetSeries::variable(0, tab, base);
  JetSeries y = JetSeries::variable(1, tab, base);

  UpdateMatrix U(2, 1);
  U.at(0, 0) = 2.0;
  U.at(1, 0) = 1.0;
  std::vector<JetSeries> F = {jet_sin(x) + y, jet_cos(y) * x};
  RemoveResult rr = remove_correctable(F, U);
  // normal equations: a = -(2 f0 + f1)/5, jet-coefficient-wise
  JetSeries expect = (F[0] * 2.0 + F[1]) * (-0.2);
  CHECK((rr.A[0] - expect).max_abs_coeff() < 1e-12);
  CHECK((rr.residual[0] - (F[0] + rr.A[0] * 2.0)).max_abs_coeff() < 1e-12);
}

TEST_CASE("determinant helper matches a hand computation") {
  UpdateMatrix U(2, 2);
  U.at(0, 0) = 4.0;
  U.at(0, 1) = -1.0;
  U.at(1, 0) = 2.0;
  U.at(1, 1) = 3.0;
  CHECK(update_determinant(U) == doctest::Approx(14.0));
}
