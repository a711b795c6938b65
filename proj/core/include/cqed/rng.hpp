#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cqed {

/// Name written into every output header so records can be regenerated.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 seeded by splitmix64(seed, stream); std::normal_distribution (libstdc++)";

/// One step of the splitmix64 mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent, reproducible sub-seed for stream `index` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Stream of standard normal draws.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double operator()() { return normal_(engine_); }

  /// Wiener increment with variance dt.
  double wiener(double dt) { return std::sqrt(dt) * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cqed
