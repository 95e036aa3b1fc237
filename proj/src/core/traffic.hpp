#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"
#include "system_state.hpp"

namespace mcsched {

using TransitionMatrix = std::array<std::array<double, 2>, 2>;

// stationary probability of state 0 for a 2-state chain
double stationary_p0(const TransitionMatrix& t);

struct ArrivalModel {
  enum class Kind { Bernoulli, MarkovBurst, Counterexample };
  Kind kind = Kind::Bernoulli;
  double p = 0.0;        // Bernoulli per-slot probability, or Counterexample frame probability
  int batch = 0;         // MarkovBurst packets per slot in the ON state
  TransitionMatrix trans{{{1.0, 0.0}, {0.0, 1.0}}};  // MarkovBurst, row-stochastic
  int burst = 0;         // Counterexample K

  int arrival_bound() const;  // implied L
  double mean_rate() const;   // per-queue long-run rate
  void validate(int n) const;
  std::string describe() const;
};

struct ChannelModel {
  enum class Kind { IidOnOff, GilbertElliott };
  Kind kind = Kind::IidOnOff;
  double q = 0.5;  // IID ON probability
  TransitionMatrix near{{{0.833, 0.167}, {0.5, 0.5}}};  // odd-indexed users
  TransitionMatrix far{{{0.5, 0.5}, {0.167, 0.833}}};   // even-indexed users

  void validate() const;
  std::string describe() const;
};

ArrivalModel parse_arrival_model(const std::string& text);
ChannelModel parse_channel_model(const std::string& text);

// Seeded per-user arrival generator. Each user owns its own stream, so the
// trace of one user never depends on how many other entities draw.
class ArrivalProcess {
 public:
  ArrivalProcess(const ArrivalModel& model, int n, std::uint64_t seed,
                 std::uint64_t replication);

  // per-queue counts for the current slot; advances the internal slot
  std::vector<int> next();

 private:
  ArrivalModel model_;
  int n_;
  std::int64_t slot_ = 0;
  std::vector<RngStream> streams_;  // one per user (Counterexample: one total)
  std::vector<int> chain_state_;    // MarkovBurst: 0 = ON(batch), 1 = OFF
  bool frame_active_ = false;       // Counterexample
};

// Seeded per-link connectivity generator.
class ChannelProcess {
 public:
  ChannelProcess(const ChannelModel& model, int n, std::uint64_t seed,
                 std::uint64_t replication);

  ConnectivityMatrix next();

 private:
  ChannelModel model_;
  int n_;
  std::vector<RngStream> streams_;  // one per (queue, server) link
  std::vector<int> chain_state_;    // GilbertElliott: 0 = ON, 1 = OFF
};

// order-sensitive FNV-1a over arrival counts / connectivity bits
class TraceHasher {
 public:
  void add_counts(const std::vector<int>& counts);
  void add_connectivity(const ConnectivityMatrix& c);
  std::uint64_t value() const { return h_; }

 private:
  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace mcsched
