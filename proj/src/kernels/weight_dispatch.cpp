#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qsslab/kernels.hpp"

namespace qsslab::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
#if defined(QSSLAB_HAVE_AVX2_KERNEL)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) out.push_back(Isa::Avx2);
#endif
#if defined(QSSLAB_HAVE_NEON_KERNEL)
  out.push_back(Isa::Neon);
#endif
  return out;
}

namespace {

Isa pick_isa() {
  const auto isas = available_isas();
  if (const char* forced = std::getenv("QSSLAB_KERNEL")) {
    for (Isa isa : isas) {
      if (to_string(isa) == forced) return isa;
    }
  }
  return isas.back();
}

}  // namespace

Isa active_isa() {
  static const Isa isa = pick_isa();
  return isa;
}

void weight_histogram(Isa isa, std::span<const std::uint64_t> words, WeightHistogram& hist) {
  switch (isa) {
    case Isa::Scalar: scalar::weight_histogram(words, hist); return;
#if defined(QSSLAB_HAVE_AVX2_KERNEL)
    case Isa::Avx2: avx2::weight_histogram(words, hist); return;
#endif
#if defined(QSSLAB_HAVE_NEON_KERNEL)
    case Isa::Neon: neon::weight_histogram(words, hist); return;
#endif
    default: throw std::invalid_argument("kernel ISA not compiled in: " + std::string(to_string(isa)));
  }
}

void weight_histogram(std::span<const std::uint64_t> words, WeightHistogram& hist) {
  weight_histogram(active_isa(), words, hist);
}

}  // namespace qsslab::kernels
