#include "kinlab/random.hpp"

#include <cmath>

namespace kinlab {

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t index,
                           std::uint64_t purpose) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(index),       static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(purpose)};
  engine_.seed(seq);
}

double RandomStream::uniform_open() {
  // 53 random bits, shifted half an ulp off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::exponential() { return exponential_(engine_); }

}  // namespace kinlab
