#include "exhol/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace exhol {

Tensor::Tensor(std::vector<IndexSpec> shape, const JetSeries& proto) : shape_(std::move(shape)) {
  std::size_t n = 1;
  for (const auto& s : shape_) n *= static_cast<std::size_t>(s.dim);
  data_.assign(n, JetSeries::zero(proto.table(), proto.base_point()).with_known_order(proto.known_order()));
}

Tensor Tensor::scalar(const JetSeries& v) {
  Tensor t({}, v);
  t.data_[0] = v;
  return t;
}

std::size_t Tensor::offset(const std::vector<int>& idx) const {
  if (idx.size() != shape_.size()) throw std::invalid_argument("Tensor: wrong index count");
  std::size_t off = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    off = off * static_cast<std::size_t>(shape_[i].dim) + static_cast<std::size_t>(idx[i]);
  return off;
}

std::vector<int> Tensor::unravel(std::size_t flat) const {
  std::vector<int> idx(shape_.size());
  for (int i = rank() - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % static_cast<std::size_t>(shape_[i].dim));
    flat /= static_cast<std::size_t>(shape_[i].dim);
  }
  return idx;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (shape_ != o.shape_) throw std::invalid_argument("Tensor +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (shape_ != o.shape_) throw std::invalid_argument("Tensor -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor operator-(const Tensor& a) { return a.scaled(-1.0); }

Tensor Tensor::scaled(double s) const {
  Tensor r = *this;
  for (auto& e : r.data_) e *= s;
  return r;
}

Tensor Tensor::scaled(const JetSeries& s) const {
  Tensor r = *this;
  for (auto& e : r.data_) e = jet_mul(e, s);
  return r;
}

Tensor outer(const Tensor& a, const Tensor& b) {
  std::vector<IndexSpec> shape = a.shape();
  shape.insert(shape.end(), b.shape().begin(), b.shape().end());
  Tensor r(std::move(shape), a.rank() ? a.proto() : b.proto());
  r.set_weight(a.weight() + b.weight());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r.entry_flat(i * b.size() + j) = jet_mul(a.entry_flat(i), b.entry_flat(j));
  return r;
}

Tensor Tensor::contracted(int p, int q) const {
  if (p == q || p < 0 || q < 0 || p >= rank() || q >= rank())
    throw std::invalid_argument("Tensor::contracted: bad positions");
  if (p > q) std::swap(p, q);
  const IndexSpec& sp = shape_[p];
  const IndexSpec& sq = shape_[q];
  if (sp.kind != sq.kind || sp.dim != sq.dim)
    throw std::invalid_argument("Tensor::contracted: mismatched index kinds");
  if (sp.kind != IndexKind::normal && sp.up == sq.up)
    throw std::invalid_argument("Tensor::contracted: contraction needs one up and one down index");

  std::vector<IndexSpec> shape;
  for (int i = 0; i < rank(); ++i)
    if (i != p && i != q) shape.push_back(shape_[i]);
  Tensor r(std::move(shape), proto());
  r.set_weight(weight_);

  std::vector<int> src(static_cast<std::size_t>(rank()));
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    std::vector<int> out_idx = r.unravel(flat);
    int oi = 0;
    for (int i = 0; i < rank(); ++i) {
      if (i == p || i == q) continue;
      src[static_cast<std::size_t>(i)] = out_idx[oi++];
    }
    JetSeries acc = JetSeries::zero(proto().table(), proto().base_point());
    for (int c = 0; c < sp.dim; ++c) {
      src[static_cast<std::size_t>(p)] = c;
      src[static_cast<std::size_t>(q)] = c;
      acc += at(src);
    }
    r.entry_flat(flat) = acc;
  }
  return r;
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != rank())
    throw std::invalid_argument("Tensor::permuted: bad permutation size");
  std::vector<IndexSpec> shape(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shape[i] = shape_[perm[i]];
  Tensor r(std::move(shape), proto());
  r.set_weight(weight_);
  std::vector<int> src(perm.size());
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    std::vector<int> out_idx = r.unravel(flat);
    for (std::size_t i = 0; i < perm.size(); ++i) src[perm[i]] = out_idx[i];
    r.entry_flat(flat) = at(src);
  }
  return r;
}

namespace {

Tensor sym_impl(const Tensor& t, const std::vector<int>& positions, bool anti) {
  for (int p : positions) {
    if (!(t.spec(p) == t.spec(positions[0])))
      throw std::invalid_argument("(anti)symmetrize: positions must share an index spec");
  }
  std::vector<int> order(positions.begin(), positions.end());
  std::sort(order.begin(), order.end());
  std::vector<int> perm_slots = order;

  Tensor acc(t.shape(), t.proto());
  acc.set_weight(t.weight());
  double count = 0;
  std::vector<int> full(static_cast<std::size_t>(t.rank()));
  std::iota(full.begin(), full.end(), 0);
  std::sort(perm_slots.begin(), perm_slots.end());
  std::vector<int> arrangement = perm_slots;
  do {
    std::vector<int> perm = full;
    // arrangement[i] occupies the slot order[i]
    for (std::size_t i = 0; i < order.size(); ++i) perm[order[i]] = arrangement[i];
    double sign = 1.0;
    if (anti) {
      // parity of the arrangement relative to `order`
      std::vector<int> a = arrangement;
      for (std::size_t i = 0; i < a.size(); ++i) {
        while (a[i] != order[i]) {
          std::size_t j = 0;
          while (order[j] != a[i]) ++j;
          std::swap(a[i], a[j]);
          sign = -sign;
        }
      }
    }
    Tensor p = t.permuted(perm);
    acc += (sign > 0) ? p : -p;
    count += 1.0;
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  return acc.scaled(1.0 / count);
}

}  // namespace

Tensor Tensor::symmetrized(const std::vector<int>& positions) const {
  return sym_impl(*this, positions, false);
}

Tensor Tensor::antisymmetrized(const std::vector<int>& positions) const {
  return sym_impl(*this, positions, true);
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (const auto& e : data_) m = std::max(m, e.max_abs_coeff());
  return m;
}

SymTuples::SymTuples(int dim, int length) : dim_(dim), length_(length) {
  std::vector<int> cur(static_cast<std::size_t>(length), 0);
  // enumerate non-decreasing tuples lexicographically
  for (;;) {
    tuples_.push_back(cur);
    int i = length - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == dim - 1) --i;
    if (i < 0) break;
    int v = ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < length; ++j) cur[static_cast<std::size_t>(j)] = v;
  }
  mult_.resize(tuples_.size());
  for (std::size_t r = 0; r < tuples_.size(); ++r) {
    // multinomial length! / prod(count_i!)
    double m = 1.0;
    for (int i = 2; i <= length; ++i) m *= i;
    int run = 1;
    for (std::size_t i = 1; i <= tuples_[r].size(); ++i) {
      if (i < tuples_[r].size() && tuples_[r][i] == tuples_[r][i - 1]) {
        ++run;
      } else {
        for (int j = 2; j <= run; ++j) m /= j;
        run = 1;
      }
    }
    mult_[r] = m;
  }
}

int SymTuples::rank(std::vector<int> t) const {
  std::sort(t.begin(), t.end());
  // tuples_ are in lexicographic order; binary search
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
  if (it == tuples_.end() || *it != t) throw std::invalid_argument("SymTuples::rank: bad tuple");
  return static_cast<int>(it - tuples_.begin());
}

}  // namespace exhol
