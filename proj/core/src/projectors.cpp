#include "exhol/projectors.hpp"

#include <stdexcept>

namespace exhol {

namespace {

void require_rank4_normal(const Tensor& f, const char* what) {
  if (f.rank() != 4) throw std::invalid_argument(std::string(what) + ": tensor must have rank 4");
  for (int i = 0; i < 4; ++i)
    if (f.spec(i).kind != IndexKind::normal)
      throw std::invalid_argument(std::string(what) + ": all indices must be normal-frame");
}

struct Term {
  double sign;
  int pat[4];
};

Tensor apply_terms(const Tensor& f, const Term* terms, int nterms, double norm) {
  Tensor r(f.shape(), f.proto());
  r.set_weight(f.weight());
  std::vector<int> src(4);
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    std::vector<int> idx = r.unravel(flat);
    JetSeries acc = JetSeries::zero(f.proto().table(), f.proto().base_point());
    for (int t = 0; t < nterms; ++t) {
      for (int s = 0; s < 4; ++s) src[s] = idx[terms[t].pat[s]];
      if (terms[t].sign > 0)
        acc += f.at(src);
      else
        acc -= f.at(src);
    }
    r.entry_flat(flat) = acc * norm;
  }
  return r;
}

}  // namespace

Tensor symmetrize(const Tensor& t, const std::vector<int>& positions) {
  return t.symmetrized(positions);
}

Tensor antisymmetrize(const Tensor& t, const std::vector<int>& positions) {
  return t.antisymmetrized(positions);
}

Tensor project_window22(const Tensor& f) {
  require_rank4_normal(f, "project_window22");
  static const Term terms[16] = {
      {+1, {0, 1, 2, 3}}, {-1, {2, 1, 0, 3}}, {-1, {0, 3, 2, 1}}, {+1, {2, 3, 0, 1}},
      {+1, {1, 0, 2, 3}}, {-1, {2, 0, 1, 3}}, {-1, {1, 3, 2, 0}}, {+1, {2, 3, 1, 0}},
      {+1, {0, 1, 3, 2}}, {-1, {3, 1, 0, 2}}, {-1, {0, 2, 3, 1}}, {+1, {3, 2, 0, 1}},
      {+1, {1, 0, 3, 2}}, {-1, {3, 0, 1, 2}}, {-1, {1, 2, 3, 0}}, {+1, {3, 2, 1, 0}},
  };
  return apply_terms(f, terms, 16, 1.0 / 12.0);
}

Tensor project_pistol31(const Tensor& f) {
  require_rank4_normal(f, "project_pistol31");
  static const Term terms[12] = {
      {+1, {0, 1, 2, 3}}, {-1, {3, 1, 2, 0}}, {+1, {1, 0, 2, 3}}, {-1, {3, 0, 2, 1}},
      {+1, {2, 1, 0, 3}}, {-1, {3, 1, 0, 2}}, {+1, {0, 2, 1, 3}}, {-1, {3, 2, 1, 0}},
      {+1, {1, 2, 0, 3}}, {-1, {3, 2, 0, 1}}, {+1, {2, 0, 1, 3}}, {-1, {3, 0, 1, 2}},
  };
  return apply_terms(f, terms, 12, 1.0 / 8.0);
}

Tensor project_sym4(const Tensor& f) {
  require_rank4_normal(f, "project_sym4");
  return f.symmetrized({0, 1, 2, 3});
}

Tensor project_window22_pair_symmetric(const Tensor& f) {
  require_rank4_normal(f, "project_window22_pair_symmetric");
  // (1/6)(2F_abcd + 2F_cdab - 2F_c(ab)d - 2F_d(ab)c), for F symmetric in the
  // pairs (0,1) and (2,3). Normalized so the result agrees with the
  // idempotent 16-term projector (the 1/3-normalized variant is twice it).
  static const Term terms[6] = {
      {+2, {0, 1, 2, 3}}, {+2, {2, 3, 0, 1}},
      {-1, {2, 0, 1, 3}}, {-1, {2, 1, 0, 3}},
      {-1, {3, 0, 1, 2}}, {-1, {3, 1, 0, 2}},
  };
  Tensor r(f.shape(), f.proto());
  r.set_weight(f.weight());
  std::vector<int> src(4);
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    std::vector<int> idx = r.unravel(flat);
    JetSeries acc = JetSeries::zero(f.proto().table(), f.proto().base_point());
    for (int t = 0; t < 6; ++t) {
      for (int s = 0; s < 4; ++s) src[s] = idx[terms[t].pat[s]];
      acc += f.at(src) * terms[t].sign;
    }
    r.entry_flat(flat) = acc * (1.0 / 6.0);
  }
  return r;
}

Tensor apply_projector(const SymmetryClass& cls, const Tensor& t) {
  switch (cls.tag) {
    case SymmetryClass::Tag::sym: return t.symmetrized(cls.positions);
    case SymmetryClass::Tag::antisym2: return t.antisymmetrized(cls.positions);
    case SymmetryClass::Tag::window22: return project_window22(t);
    case SymmetryClass::Tag::pistol31: return project_pistol31(t);
    case SymmetryClass::Tag::generalized_window:
      throw std::invalid_argument(
          "generalized window projection has no closed form here; it is realized as the "
          "least-squares residual of remove_correctable");
  }
  throw std::logic_error("apply_projector: bad tag");
}

}  // namespace exhol
