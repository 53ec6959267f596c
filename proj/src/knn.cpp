#include "evade/knn.hpp"

#include <algorithm>
#include <stdexcept>

namespace evade {

std::size_t manhattan(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("manhattan: dimension mismatch");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::vector<Neighbor> knn_neighbors(const BitVec& query, const Dataset& pool,
                                    std::size_t k) {
  if (pool.size() == 0) throw std::invalid_argument("knn: empty pool");
  if (k > pool.size()) throw std::invalid_argument("knn: k exceeds pool size");

  std::vector<Neighbor> all(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    all[i] = {i, manhattan(query, pool.samples[i].features)};
  }
  auto closer = [&](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return pool.samples[a.index].id < pool.samples[b.index].id;
  };
  std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);
  all.resize(k);
  return all;
}

}  // namespace evade
