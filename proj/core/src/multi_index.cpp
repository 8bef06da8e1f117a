#include "exhol/multi_index.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace exhol {

namespace {

void enumerate_rec(int nvars, int order, int var, std::vector<int>& cur, int used,
                   int target_degree, std::vector<std::vector<int>>& out) {
  if (var == nvars - 1) {
    cur[var] = target_degree - used;
    out.push_back(cur);
    return;
  }
  for (int e = target_degree - used; e >= 0; --e) {
    cur[var] = e;
    enumerate_rec(nvars, order, var + 1, cur, used + e, target_degree, out);
  }
  cur[var] = 0;
}

}  // namespace

MultiIndexTable::MultiIndexTable(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 0 || order < 0) throw std::invalid_argument("MultiIndexTable: negative shape");
  if (nvars == 0) {
    indices_.push_back({});
    degrees_.push_back(0);
    degree_begin_ = {0, 1};
    for (int d = 1; d <= order; ++d) degree_begin_.push_back(1);
    products_.push_back({0, 0, 0});
    return;
  }

  degree_begin_.push_back(0);
  std::vector<int> cur(nvars, 0);
  for (int deg = 0; deg <= order; ++deg) {
    enumerate_rec(nvars, order, 0, cur, 0, deg, indices_);
    degree_begin_.push_back(static_cast<int>(indices_.size()));
  }
  degrees_.resize(indices_.size());
  for (std::size_t p = 0; p < indices_.size(); ++p) {
    int d = 0;
    for (int e : indices_[p]) d += e;
    degrees_[p] = d;
    lookup_[key_of(indices_[p])] = static_cast<int>(p);
  }

  const int n = size();
  shift_up_.assign(static_cast<std::size_t>(n) * nvars_, -1);
  shift_down_.assign(static_cast<std::size_t>(n) * nvars_, -1);
  std::vector<int> tmp(nvars_);
  for (int p = 0; p < n; ++p) {
    for (int v = 0; v < nvars_; ++v) {
      tmp = indices_[p];
      if (degrees_[p] + 1 <= order_) {
        ++tmp[v];
        shift_up_[static_cast<std::size_t>(p) * nvars_ + v] = position(tmp);
        --tmp[v];
      }
      if (tmp[v] > 0) {
        --tmp[v];
        shift_down_[static_cast<std::size_t>(p) * nvars_ + v] = position(tmp);
      }
    }
  }

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (degrees_[a] + degrees_[b] > order_) continue;
      tmp = indices_[a];
      for (int v = 0; v < nvars_; ++v) tmp[v] += indices_[b][v];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(position(tmp))});
    }
  }
}

std::uint64_t MultiIndexTable::key_of(const std::vector<int>& mi) const {
  // Degrees fit comfortably in 8 bits for every table this project builds.
  std::uint64_t k = 0;
  for (int e : mi) k = (k << 8) | static_cast<std::uint64_t>(e & 0xff);
  return k;
}

int MultiIndexTable::position(const std::vector<int>& mi) const {
  auto it = lookup_.find(key_of(mi));
  return it == lookup_.end() ? -1 : it->second;
}

std::shared_ptr<const MultiIndexTable> MultiIndexTable::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const MultiIndexTable>(nvars, order);
  cache[key] = table;
  return table;
}

}  // namespace exhol
