#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Popcount kernels behind codeword weight scans. Every ISA variant computes
// the same histogram; the dispatcher picks the widest one the CPU supports.

namespace qsslab::kernels {

inline constexpr std::size_t kHistogramBins = 65;
using WeightHistogram = std::array<std::uint64_t, kHistogramBins>;

enum class Isa { Scalar, Avx2, Neon };
std::string_view to_string(Isa isa);

/// ISAs compiled in and supported by the running CPU, Scalar first.
std::vector<Isa> available_isas();

/// The ISA used by weight_histogram(). Honors QSSLAB_KERNEL=scalar|avx2|neon
/// when that ISA is available.
Isa active_isa();

/// hist[w] += number of words with popcount w.
void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist);
void weight_histogram(Isa isa, std::span<const std::uint64_t> words, WeightHistogram& hist);

namespace scalar {
void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist);
}
namespace avx2 {
void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist);
}
namespace neon {
void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist);
}

}  // namespace qsslab::kernels
