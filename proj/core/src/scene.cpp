#include "exhol/scene.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace exhol {

namespace {

std::vector<std::string> coordinate_scope(const std::string& prefix, int n) {
  std::vector<std::string> scope;
  for (int i = 0; i < n; ++i) scope.push_back(prefix + std::to_string(i));
  return scope;
}

}  // namespace

Scene Scene::from_json_text(const std::string& text, int jet_order_override) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("scene file is not valid JSON: ") + e.what());
  }

  Scene s;
  if (!j.contains("dimension") || !j.contains("codimension") || !j.contains("metric") ||
      !j.contains("embedding") || !j.contains("base_point"))
    throw std::invalid_argument(
        "scene file must contain dimension, codimension, metric, embedding, base_point");
  s.d = j.at("dimension").get<int>();
  s.k = j.at("codimension").get<int>();
  if (s.d < 3) throw std::invalid_argument("scene: dimension must be >= 3");
  if (s.k < 1 || s.k >= s.d) throw std::invalid_argument("scene: need 0 < codimension < dimension");
  s.jet_order = j.value("jet_order", 6);
  if (jet_order_override > 0) s.jet_order = jet_order_override;
  if (s.jet_order < 2 || s.jet_order > 12)
    throw std::invalid_argument("scene: jet_order must lie in [2, 12]");

  const auto x_scope = coordinate_scope("x", s.d);
  const auto u_scope = coordinate_scope("u", s.d - s.k);

  const auto& gm = j.at("metric");
  if (static_cast<int>(gm.size()) != s.d)
    throw std::invalid_argument("scene: metric must be a d x d array of expressions");
  for (int r = 0; r < s.d; ++r) {
    if (static_cast<int>(gm[r].size()) != s.d)
      throw std::invalid_argument("scene: metric must be a d x d array of expressions");
    std::vector<ExprAst> row;
    for (int c = 0; c < s.d; ++c)
      row.push_back(parse_expression(gm[r][c].get<std::string>(), x_scope));
    s.metric.push_back(std::move(row));
  }

  const auto& emb = j.at("embedding");
  if (static_cast<int>(emb.size()) != s.d)
    throw std::invalid_argument("scene: embedding must have d expressions");
  for (int i = 0; i < s.d; ++i)
    s.embedding.push_back(parse_expression(emb[i].get<std::string>(), u_scope));

  if (j.contains("frame_seeds") && !j.at("frame_seeds").is_null()) {
    const auto& fs = j.at("frame_seeds");
    if (static_cast<int>(fs.size()) != s.k)
      throw std::invalid_argument("scene: frame_seeds must have k rows");
    for (int r = 0; r < s.k; ++r) {
      if (static_cast<int>(fs[r].size()) != s.d)
        throw std::invalid_argument("scene: each frame seed must have d components");
      std::vector<ExprAst> row;
      for (int c = 0; c < s.d; ++c)
        row.push_back(parse_expression(fs[r][c].get<std::string>(), u_scope));
      s.frame_seeds.push_back(std::move(row));
    }
  }

  const auto& bp = j.at("base_point");
  if (static_cast<int>(bp.size()) != s.d - s.k)
    throw std::invalid_argument("scene: base_point must have d-k entries");
  for (const auto& v : bp) s.base_u.push_back(v.get<double>());

  if (j.contains("conformal_factor") && !j.at("conformal_factor").is_null())
    s.conformal_factor = parse_expression(j.at("conformal_factor").get<std::string>(), x_scope);

  return s;
}

Scene Scene::from_json_file(const std::string& path, int jet_order_override) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scene file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return from_json_text(os.str(), jet_order_override);
}

std::vector<double> Scene::base_x() const {
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = embedding[i].eval(base_u);
  return x;
}

std::vector<JetSeries> Scene::embedding_jets() const {
  std::vector<JetSeries> out;
  TablePtr tab = u_table();
  for (int i = 0; i < d; ++i) out.push_back(jet_eval(embedding[i], base_u, tab));
  return out;
}

MetricJet Scene::metric_jet(bool conformally_rescaled) const {
  MetricJet m = MetricJet::from_expressions(metric, base_x(), x_table());
  if (!conformally_rescaled) return m;
  JetSeries om = conformal_factor_jet();
  JetSeries om2 = jet_mul(om, om);
  JetMatrix g2(d, om2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g2.at(i, j) = jet_mul(om2, m.g.at(i, j));
  return MetricJet::from_components(std::move(g2));
}

JetSeries Scene::conformal_factor_jet() const {
  if (!conformal_factor)
    throw std::invalid_argument("scene has no conformal_factor");
  JetSeries om = jet_eval(*conformal_factor, base_x(), x_table());
  if (om.value() <= 0.0)
    throw std::invalid_argument("conformal factor must be positive at the base point");
  return om;
}

}  // namespace exhol
