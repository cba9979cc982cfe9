#pragma once

#include <cstdint>
#include <vector>

namespace wildgan {

// Index batches for one epoch. Every index in [0, n) appears exactly once;
// the final batch may be short. With shuffle the permutation is a pure
// function of (seed, epoch).
std::vector<std::vector<int>> epoch_batches(int n, int batch_size, uint64_t seed,
                                            bool shuffle, int epoch);

}  // namespace wildgan
