#include "doctest.h"
#include "qsslab/kernels.hpp"
#include "qsslab/rng.hpp"

using namespace qsslab;
using namespace qsslab::kernels;

TEST_CASE("every compiled kernel matches the scalar reference") {
  Rng rng(21);
  for (std::size_t len : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 1000u, 4097u}) {
    std::vector<std::uint64_t> words(len);
    for (auto& w : words) {
      // mix dense, sparse and edge patterns
      switch (rng.below(4)) {
        case 0: w = rng.next(); break;
        case 1: w = rng.next() & rng.next() & rng.next(); break;
        case 2: w = ~std::uint64_t{0}; break;
        default: w = 0; break;
      }
    }
    WeightHistogram ref{};
    scalar::weight_histogram(words, ref);
    std::uint64_t total = 0;
    for (auto c : ref) total += c;
    CHECK(total == len);
    for (Isa isa : available_isas()) {
      WeightHistogram got{};
      weight_histogram(isa, words, got);
      CHECK_MESSAGE(got == ref, to_string(isa), " len=", len);
    }
  }
}

TEST_CASE("active kernel is one of the available ones") {
  const auto isas = available_isas();
  CHECK(std::find(isas.begin(), isas.end(), active_isa()) != isas.end());
}
