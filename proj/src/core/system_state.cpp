#include "system_state.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace mcsched {

void Schedule::allocate(int server, int queue) {
  if (server < 0 || server >= server_count())
    throw std::invalid_argument("schedule: server index out of range");
  if (server_queue_[server] >= 0 && server_queue_[server] != queue)
    throw std::invalid_argument("schedule: server already allocated to another queue");
  server_queue_[server] = queue;
}

void Schedule::assign(int server, int queue, std::uint64_t seq) {
  allocate(server, queue);
  for (const auto& a : assignments_) {
    if (a.server == server)
      throw std::invalid_argument("schedule: server assigned twice");
    if (a.seq == seq)
      throw std::invalid_argument("schedule: packet assigned to two servers");
  }
  assignments_.push_back({server, queue, seq});
}

void Schedule::merge(const Schedule& other) {
  if (other.server_count() != server_count())
    throw std::invalid_argument("schedule merge: size mismatch");
  for (int j = 0; j < server_count(); ++j)
    if (other.server_queue_[j] >= 0) allocate(j, other.server_queue_[j]);
  for (const auto& a : other.assignments_) {
    bool dup_server = false;
    for (const auto& b : assignments_) dup_server |= (b.server == a.server);
    if (dup_server) throw std::invalid_argument("schedule merge: server conflict");
    assignments_.push_back(a);
  }
}

SystemState::SystemState(SystemParams params) : params_(params) {
  if (params_.n < 1) throw std::invalid_argument("n must be positive");
  if (params_.L < 1) throw std::invalid_argument("L must be positive");
  queues_.resize(params_.n);
}

std::int64_t SystemState::total_backlog() const {
  std::int64_t total = 0;
  for (const auto& q : queues_) total += static_cast<std::int64_t>(q.size());
  return total;
}

std::int64_t SystemState::hol_delay(int i) const {
  if (queues_[i].empty()) return 0;
  return slot_ - queues_[i].front().arrival_slot;
}

std::int64_t SystemState::packet_delay(int i, int l) const {
  if (l < 1 || l > queue_length(i))
    throw std::invalid_argument("packet_delay: position out of range");
  return slot_ - queues_[i][static_cast<std::size_t>(l - 1)].arrival_slot;
}

std::int64_t SystemState::max_hol_delay() const {
  std::int64_t w = 0;
  for (int i = 0; i < params_.n; ++i) w = std::max(w, hol_delay(i));
  return w;
}

std::vector<Packet> SystemState::apply_arrivals(const std::vector<int>& counts) {
  if (static_cast<int>(counts.size()) != params_.n)
    throw std::invalid_argument("apply_arrivals: counts size mismatch");
  for (int c : counts)
    if (c < 0 || c > params_.L)
      throw std::invalid_argument("apply_arrivals: count outside [0, L]");

  std::vector<Packet> fresh;
  for (int i = 0; i < params_.n; ++i) {
    for (int x = 1; x <= counts[i]; ++x) {
      Packet p{slot_, i, x, next_seq_++};
      queues_[i].push_back(p);
      fresh.push_back(p);
    }
  }
  // same-slot packets: smaller slot_order first, then smaller queue index
  std::sort(fresh.begin(), fresh.end(), [this](const Packet& a, const Packet& b) {
    return rank_key(a) > rank_key(b);
  });
  return fresh;
}

std::vector<Packet> SystemState::apply_schedule(const Schedule& sched) {
  std::vector<Packet> served;
  if (sched.assignments().empty()) return served;

  std::vector<std::unordered_set<std::uint64_t>> per_queue(params_.n);
  for (const auto& a : sched.assignments()) {
    if (a.queue < 0 || a.queue >= params_.n)
      throw std::invalid_argument("apply_schedule: queue index out of range");
    if (!per_queue[a.queue].insert(a.seq).second)
      throw std::invalid_argument("apply_schedule: duplicate packet assignment");
  }
  for (int i = 0; i < params_.n; ++i) {
    if (per_queue[i].empty()) continue;
    std::size_t found = 0;
    std::deque<Packet> rest;
    for (const Packet& p : queues_[i]) {
      if (per_queue[i].count(p.seq)) {
        served.push_back(p);
        ++found;
      } else {
        rest.push_back(p);
      }
    }
    if (found != per_queue[i].size())
      throw std::invalid_argument("apply_schedule: assignment references absent packet");
    queues_[i] = std::move(rest);
  }
  return served;
}

std::vector<Packet> SystemState::oldest_packets(std::size_t k) const {
  std::vector<Packet> out;
  if (k == 0) return out;
  std::vector<std::size_t> pos(params_.n, 0);
  while (out.size() < k) {
    int best = -1;
    std::int64_t best_key = 0;
    for (int i = 0; i < params_.n; ++i) {
      if (pos[i] >= queues_[i].size()) continue;
      std::int64_t key = rank_key(queues_[i][pos[i]]);
      if (best < 0 || key > best_key) {
        best = i;
        best_key = key;
      }
    }
    if (best < 0) break;
    out.push_back(queues_[best][pos[best]++]);
  }
  return out;
}

void validate_schedule(const SystemState& s, const ConnectivityMatrix& c,
                       const Schedule& sched) {
  if (sched.server_count() != s.params().n)
    throw std::invalid_argument("schedule: server count mismatch");
  std::unordered_set<std::uint64_t> seen;
  for (const auto& a : sched.assignments()) {
    if (!c.on(a.queue, a.server))
      throw std::invalid_argument("schedule: assignment over an OFF link");
    if (!seen.insert(a.seq).second)
      throw std::invalid_argument("schedule: packet served twice");
    bool present = false;
    for (const Packet& p : s.queue(a.queue)) present |= (p.seq == a.seq);
    if (!present)
      throw std::invalid_argument("schedule: packet not in its queue");
  }
}

}  // namespace mcsched
