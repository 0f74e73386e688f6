#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace lowner {

// Counter-based generator: value n of stream (seed, stream) is
// splitmix64_mix(key + n * gamma). Identified as "smx64-ctr v1".
class Rng {
 public:
  static constexpr std::string_view kName = "smx64-ctr v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1), 53 bits
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // Box-Muller, cosine branch
  Eigen::VectorXd normal_vector(int n);
  Eigen::VectorXd unit_sphere(int n);
  int uniform_int(int n);  // {0, ..., n-1}

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace lowner
