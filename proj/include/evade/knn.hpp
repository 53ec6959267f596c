#pragma once

#include "evade/dataset.hpp"

namespace evade {

struct Neighbor {
  std::size_t index;  // position in the pool
  std::size_t distance;
};

std::size_t manhattan(const BitVec& a, const BitVec& b);

// The k pool samples nearest the query in L1, ascending distance, ties
// broken by lexicographically lower sample id. Brute force; pools here are
// desk-scale.
std::vector<Neighbor> knn_neighbors(const BitVec& query, const Dataset& pool,
                                    std::size_t k);

}  // namespace evade
