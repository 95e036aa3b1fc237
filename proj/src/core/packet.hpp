#pragma once

#include <cstdint>
#include <stdexcept>

namespace mcsched {

struct SystemParams {
  int n = 1;  // channels == users
  int L = 1;  // per-queue per-slot arrival bound
};

struct Packet {
  std::int64_t arrival_slot = 0;
  int queue = 0;       // 0-based queue index
  int slot_order = 1;  // 1-based position among same-slot arrivals to the queue
  std::uint64_t seq = 0;
};

// Base of the scaled-integer weight: one slot of age counts for
// (L+1)*(n+1) units, so the fractional tie-break terms can never
// outweigh an age difference.
inline std::int64_t weight_base(const SystemParams& p) {
  return static_cast<std::int64_t>(p.L + 1) * (p.n + 1);
}

// Time-invariant part of the weight key. Relative order of two packets is the
// same in every slot, so per-queue sequences sorted by this key stay sorted.
inline std::int64_t packet_rank_key(const Packet& pk, const SystemParams& p) {
  if (pk.queue < 0 || pk.queue >= p.n)
    throw std::invalid_argument("packet queue index out of range");
  if (pk.slot_order < 1 || pk.slot_order > p.L)
    throw std::invalid_argument("packet slot_order out of range");
  return -pk.arrival_slot * weight_base(p) +
         static_cast<std::int64_t>(p.L + 1 - pk.slot_order) * (p.n + 1) +
         (p.n - pk.queue);
}

// Exact scaled packet weight at slot t. Dividing by weight_base gives the
// rational weight t - t_p + (L+1-x_p)/(L+1) + (n+1-q_p)/((L+1)(n+1)).
// Injective across all distinct packets alive at the same slot.
inline std::int64_t packet_weight_key(const Packet& pk, std::int64_t slot,
                                      const SystemParams& p) {
  if (slot < pk.arrival_slot)
    throw std::invalid_argument("packet weight requested before arrival");
  return slot * weight_base(p) + packet_rank_key(pk, p);
}

// Queue-blind age class: t - t_p + (L+1-x_p)/(L+1), scaled by (L+1).
// Packets in the same class differ only in their queue index.
inline std::int64_t packet_class_key(const Packet& pk, std::int64_t slot,
                                     const SystemParams& p) {
  return (slot - pk.arrival_slot) * (p.L + 1) + (p.L + 1 - pk.slot_order);
}

}  // namespace mcsched
