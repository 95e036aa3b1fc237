#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "packet.hpp"

namespace mcsched {

class ConnectivityMatrix {
 public:
  ConnectivityMatrix() : n_(0) {}
  explicit ConnectivityMatrix(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  bool on(int queue, int server) const {
    return bits_[static_cast<std::size_t>(queue) * n_ + server] != 0;
  }
  void set(int queue, int server, bool v) {
    bits_[static_cast<std::size_t>(queue) * n_ + server] = v ? 1 : 0;
  }
  const std::vector<std::uint8_t>& raw() const { return bits_; }

 private:
  int n_;
  std::vector<std::uint8_t> bits_;
};

struct Assignment {
  int server = -1;
  int queue = -1;
  std::uint64_t seq = 0;
};

// Per-slot decision. Every served packet implies a queue-level allocation for
// its server; a server may also be allocated to a queue without a packet
// (e.g. more servers sent to a queue than it has packets).
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(int server_count) : server_queue_(server_count, -1) {}

  void allocate(int server, int queue);
  void assign(int server, int queue, std::uint64_t seq);

  int server_count() const { return static_cast<int>(server_queue_.size()); }
  int queue_of(int server) const { return server_queue_[server]; }
  bool server_allocated(int server) const { return server_queue_[server] >= 0; }
  const std::vector<Assignment>& assignments() const { return assignments_; }
  std::size_t packet_count() const { return assignments_.size(); }

  void merge(const Schedule& other);

 private:
  std::vector<int> server_queue_;
  std::vector<Assignment> assignments_;
};

class SystemState {
 public:
  explicit SystemState(SystemParams params);

  const SystemParams& params() const { return params_; }
  std::int64_t slot() const { return slot_; }

  int queue_length(int i) const { return static_cast<int>(queues_[i].size()); }
  std::int64_t total_backlog() const;
  const std::deque<Packet>& queue(int i) const { return queues_[i]; }

  // W_i(t): HOL delay, 0 for an empty queue
  std::int64_t hol_delay(int i) const;
  // Z_{i,l}(t), l is 1-based; the l-th packet must exist
  std::int64_t packet_delay(int i, int l) const;
  // W(t) = max_i W_i(t)
  std::int64_t max_hol_delay() const;

  std::int64_t weight_key(const Packet& p) const {
    return packet_weight_key(p, slot_, params_);
  }
  std::int64_t rank_key(const Packet& p) const { return packet_rank_key(p, params_); }

  // Appends count[i] packets to queue i with arrival_slot = current slot.
  // Returns the new packets in descending weight order.
  std::vector<Packet> apply_arrivals(const std::vector<int>& counts);

  // Removes every assigned packet; returns the served packets.
  std::vector<Packet> apply_schedule(const Schedule& sched);

  void advance_slot() { ++slot_; }

  // The k globally oldest packets in descending weight order
  // (n-way merge over the weight-sorted queues).
  std::vector<Packet> oldest_packets(std::size_t k) const;

 private:
  SystemParams params_;
  std::int64_t slot_ = 0;
  std::uint64_t next_seq_ = 0;
  std::vector<std::deque<Packet>> queues_;
};

// Throws std::invalid_argument if sched violates the schedule contract
// against the given state and connectivity.
void validate_schedule(const SystemState& s, const ConnectivityMatrix& c,
                       const Schedule& sched);

}  // namespace mcsched
