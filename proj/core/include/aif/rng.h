#ifndef AIF_RNG_H_
#define AIF_RNG_H_

#include <cstdint>
#include <random>

namespace aif {

// Consumers of randomness within one episode. Each gets its own substream so
// that adding draws in one consumer never perturbs another.
enum class StreamId : std::uint64_t {
  kScenario = 1,
  kPedestrian = 2,
  kObservationNoise = 3,
  kBeliefInit = 4,
  kBeliefUpdate = 5,
  kPlanner = 6,
};

// Derives a well-mixed 64-bit seed for (episode seed, stream).
std::uint64_t SubstreamSeed(std::uint64_t seed, StreamId stream);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, StreamId stream)
      : engine_(SubstreamSeed(seed, stream)) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double Normal(double mean, double stddev) {
    if (stddev <= 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  bool Bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::bernoulli_distribution(p)(engine_);
  }
  // Uniform integer in [0, n).
  std::size_t Index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aif

#endif  // AIF_RNG_H_
