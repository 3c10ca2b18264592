#pragma once

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace kinlab {

/// Independent pseudo-random stream, derived deterministically from a
/// (master_seed, index, purpose) triple. Never share one between threads.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t index = 0,
                        std::uint64_t purpose = 0);

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  double exponential();

private:
  std::mt19937_64 engine_;
  // Ziggurat samplers; roughly twice as fast as the std:: ones here.
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::exponential_distribution<double> exponential_{1.0};
};

namespace stream_purpose {
inline constexpr std::uint64_t trajectory = 0;
inline constexpr std::uint64_t gaussian_limit = 1;
inline constexpr std::uint64_t oscillation = 2;
}  // namespace stream_purpose

}  // namespace kinlab
