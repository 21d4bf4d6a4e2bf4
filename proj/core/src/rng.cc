#include "aif/rng.h"

namespace aif {
namespace {

// splitmix64 finalizer
std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SubstreamSeed(std::uint64_t seed, StreamId stream) {
  return Mix(Mix(seed) ^ Mix(static_cast<std::uint64_t>(stream) << 32));
}

}  // namespace aif
