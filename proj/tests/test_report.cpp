#include <doctest.h>

#include "exhol/report.hpp"

using namespace exhol;

TEST_CASE("checks pass exactly when within tolerance") {
  Report r;
  r.command = "verify";
  r.add("zero-residual", 1e-9, 1e-7, "gauss-equation");
  r.add("bad-residual", 1e-3, 1e-7, "codazzi-mainardi");
  CHECK(r.checks[0].pass);
  CHECK_FALSE(r.checks[1].pass);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("json serialization is deterministic") {
  Report r;
  r.command = "obstructions";
  r.scene_hash = fnv1a_hex("scene-bytes");
  r.add("f2-window-residual", 0.0, 1e-9, "window-representation");
  ObstructionTable t;
  t.name = "f2";
  t.index_kinds = {"normal", "normal"};
  t.dims = {2, 2};
  t.values = {1.0, 2.0, 3.0, 4.0};
  r.obstructions.push_back(t);
  std::string a = r.to_json();
  std::string b = r.to_json();
  CHECK(a == b);
  CHECK(a.find("\"command\": \"obstructions\"") != std::string::npos);
  CHECK(a.find("f2-window-residual") != std::string::npos);
}

TEST_CASE("csv emission walks indices row-major") {
  Report r;
  ObstructionTable t;
  t.name = "beta";
  t.index_kinds = {"tangent", "normal"};
  t.dims = {1, 2};
  t.values = {0.5, -0.5};
  r.obstructions.push_back(t);
  std::string csv = r.obstructions_csv();
  CHECK(csv.find("beta,\"0 0\",0.5") != std::string::npos);
  CHECK(csv.find("beta,\"0 1\",-0.5") != std::string::npos);
}

TEST_CASE("fnv hash is stable") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
}
