#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

#include "qsslab/kernels.hpp"

namespace qsslab::kernels::avx2 {

namespace {

// Per-64-bit-lane popcount: nibble lookup through pshufb, then SAD against
// zero folds the byte counts of each lane into that lane.
inline __m256i popcount_lanes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1,
                                          2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0F);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
  return _mm256_sad_epu8(bytes, _mm256_setzero_si256());
}

}  // namespace

void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist) {
  const std::size_t vec_end = words.size() / 4 * 4;
  alignas(32) std::uint64_t counts[4];
  std::size_t i = 0;
  for (; i < vec_end; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words.data() + i));
    _mm256_store_si256(reinterpret_cast<__m256i*>(counts), popcount_lanes(v));
    ++hist[counts[0]];
    ++hist[counts[1]];
    ++hist[counts[2]];
    ++hist[counts[3]];
  }
  for (; i < words.size(); ++i) ++hist[static_cast<std::size_t>(std::popcount(words[i]))];
}

}  // namespace qsslab::kernels::avx2

#endif
