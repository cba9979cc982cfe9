#include "wildgan/batching.hpp"

#include <numeric>

#include "wildgan/error.hpp"
#include "wildgan/rng.hpp"

namespace wildgan {

std::vector<std::vector<int>> epoch_batches(int n, int batch_size, uint64_t seed,
                                            bool shuffle, int epoch) {
  if (n < 1) throw ValidationError("epoch_batches: empty dataset");
  if (batch_size < 1) throw ValidationError("epoch_batches: batch_size must be >= 1");
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    Rng rng(mix_seed(seed, 0x9a7cull + static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
  }
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace wildgan
