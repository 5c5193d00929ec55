#include <bit>

#include "qsslab/kernels.hpp"

namespace qsslab::kernels::scalar {

void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist) {
  for (std::uint64_t w : words) ++hist[static_cast<std::size_t>(std::popcount(w))];
}

}  // namespace qsslab::kernels::scalar
