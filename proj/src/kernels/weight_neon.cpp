#if defined(__aarch64__)

#include <arm_neon.h>

#include <bit>

#include "qsslab/kernels.hpp"

namespace qsslab::kernels::neon {

void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist) {
  const std::size_t vec_end = words.size() / 2 * 2;
  std::size_t i = 0;
  for (; i < vec_end; i += 2) {
    const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(words.data() + i)));
    const uint64x2_t lanes = vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(bytes)));
    ++hist[vgetq_lane_u64(lanes, 0)];
    ++hist[vgetq_lane_u64(lanes, 1)];
  }
  for (; i < words.size(); ++i) ++hist[static_cast<std::size_t>(std::popcount(words[i]))];
}

}  // namespace qsslab::kernels::neon

#endif
