#pragma once

#include <cstdint>

namespace mcsched {

// splitmix64 finalizer. Used both for seeding/stream derivation and as the
// per-stream generator, so traces are identical across platforms and
// independent of the standard library.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a + 0x9e3779b97f4a7c15ULL * (b + 1));
}

// Deterministic counter-based stream. Streams for distinct
// (seed, replication, domain, entity) labels are independent; adding more
// streams to a simulation never perturbs existing ones.
class RngStream {
 public:
  RngStream() : state_(0) {}
  RngStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t domain,
            std::uint64_t entity) {
    std::uint64_t k = hash_combine(seed, replication);
    k = hash_combine(k, domain);
    state_ = hash_combine(k, entity);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // uniform in [0, 1), 53 bits
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// stream domains, so entity ids never collide across generator kinds
enum class StreamDomain : std::uint64_t {
  Arrival = 1,
  Channel = 2,
  InitState = 3,
};

}  // namespace mcsched
