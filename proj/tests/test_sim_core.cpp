#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "core/rng.hpp"
#include "core/system_state.hpp"

using namespace mcsched;

TEST_CASE("packet weight formula") {
  const SystemParams p{2, 1};  // n=2, L=1
  // base (L+1)(n+1) = 6; weight is key/6
  CHECK(weight_base(p) == 6);
  const Packet a{0, 0, 1, 0};  // queue 1 in 1-based terms
  const Packet b{0, 1, 1, 1};  // queue 2
  CHECK(packet_weight_key(a, 0, p) == 5);  // 5/6
  CHECK(packet_weight_key(b, 0, p) == 4);  // 4/6: larger queue index loses ties
  CHECK(packet_weight_key(a, 3, p) == 5 + 3 * 6);  // age adds whole units
}

TEST_CASE("packet weight precondition errors") {
  const SystemParams p{2, 1};
  CHECK_THROWS_AS(packet_weight_key(Packet{0, 2, 1, 0}, 0, p), std::invalid_argument);
  CHECK_THROWS_AS(packet_weight_key(Packet{0, 0, 2, 0}, 0, p), std::invalid_argument);
  CHECK_THROWS_AS(packet_weight_key(Packet{5, 0, 1, 0}, 4, p), std::invalid_argument);
}

TEST_CASE("weight keys are injective across distinct packets") {
  for (int n = 1; n <= 5; ++n) {
    for (int L = 1; L <= 3; ++L) {
      const SystemParams p{n, L};
      std::set<std::int64_t> keys;
      int count = 0;
      for (int t = 0; t <= 4; ++t)
        for (int q = 0; q < n; ++q)
          for (int x = 1; x <= L; ++x) {
            keys.insert(packet_weight_key(Packet{t, q, x, 0}, 4, p));
            ++count;
          }
      CHECK(static_cast<int>(keys.size()) == count);
    }
  }
}

TEST_CASE("arrivals append in weight order") {
  SystemState s(SystemParams{2, 2});
  s.advance_slot();  // slot 7 via repeated advance
  for (int i = 0; i < 6; ++i) s.advance_slot();
  const auto fresh = s.apply_arrivals({2, 1});
  CHECK(fresh.size() == 3);
  // descending weight: queue 0 first arrival, queue 1 first arrival order
  CHECK(fresh[0].queue == 0);
  CHECK(fresh[0].slot_order == 1);
  for (std::size_t i = 1; i < fresh.size(); ++i)
    CHECK(s.weight_key(fresh[i - 1]) > s.weight_key(fresh[i]));
  CHECK(s.queue_length(0) == 2);
  CHECK(s.queue(0)[0].arrival_slot == 7);
  CHECK(s.queue(0)[0].slot_order == 1);
  CHECK(s.queue(0)[1].slot_order == 2);
  CHECK_THROWS_AS(s.apply_arrivals({3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(s.apply_arrivals({1}), std::invalid_argument);
}

TEST_CASE("hol delays and backlog") {
  SystemState s(SystemParams{2, 1});
  CHECK(s.max_hol_delay() == 0);
  CHECK(s.hol_delay(0) == 0);  // empty queue convention
  s.apply_arrivals({1, 0});
  s.advance_slot();
  s.apply_arrivals({1, 1});
  s.advance_slot();
  CHECK(s.hol_delay(0) == 2);
  CHECK(s.hol_delay(1) == 1);
  CHECK(s.max_hol_delay() == 2);
  CHECK(s.total_backlog() == 3);
  CHECK(s.packet_delay(0, 1) == 2);
  CHECK(s.packet_delay(0, 2) == 1);
  CHECK_THROWS_AS(s.packet_delay(0, 3), std::invalid_argument);
}

namespace {

// random state built by simulating a few slots of arrivals
SystemState random_state(RngStream& rng, int n, int L, int slots) {
  SystemState s(SystemParams{n, L});
  for (int t = 0; t < slots; ++t) {
    std::vector<int> counts(n);
    for (int i = 0; i < n; ++i) counts[i] = static_cast<int>(rng.next_u64() % (L + 1));
    s.apply_arrivals(counts);
    s.advance_slot();
  }
  return s;
}

}  // namespace

TEST_CASE("oldest_packets equals full-sort prefix") {
  RngStream rng(7, 0, 9, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 5);
    const int L = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto s = random_state(rng, n, L, 5);

    std::vector<Packet> all;
    for (int i = 0; i < n; ++i)
      for (const auto& p : s.queue(i)) all.push_back(p);
    std::sort(all.begin(), all.end(), [&](const Packet& a, const Packet& b) {
      return s.rank_key(a) > s.rank_key(b);
    });

    for (std::size_t k : {std::size_t{0}, std::size_t{1}, all.size() / 2, all.size(),
                          all.size() + 3}) {
      const auto got = s.oldest_packets(k);
      const std::size_t expect = std::min(k, all.size());
      REQUIRE(got.size() == expect);
      for (std::size_t i = 0; i < expect; ++i) CHECK(got[i].seq == all[i].seq);
    }
  }
}

TEST_CASE("per-queue sequences stay weight sorted") {
  RngStream rng(8, 0, 9, 0);
  const auto s = random_state(rng, 4, 3, 8);
  for (int i = 0; i < 4; ++i) {
    const auto& q = s.queue(i);
    for (std::size_t j = 1; j < q.size(); ++j)
      CHECK(s.rank_key(q[j - 1]) > s.rank_key(q[j]));
  }
}

TEST_CASE("apply_schedule removes assigned packets and conserves backlog") {
  SystemState s(SystemParams{2, 2});
  s.apply_arrivals({2, 1});
  s.advance_slot();
  s.apply_arrivals({0, 1});

  Schedule sched(2);
  sched.assign(0, 0, s.queue(0)[0].seq);
  sched.assign(1, 1, s.queue(1)[1].seq);  // non-HOL service is allowed here
  const auto before = s.total_backlog();
  const auto served = s.apply_schedule(sched);
  CHECK(served.size() == 2);
  CHECK(s.total_backlog() == before - 2);
  CHECK(s.queue_length(0) == 1);
  CHECK(s.queue(0)[0].slot_order == 2);

  Schedule bad(2);
  bad.assign(0, 0, 999);  // absent packet
  CHECK_THROWS_AS(s.apply_schedule(bad), std::invalid_argument);
}

TEST_CASE("schedule validation") {
  SystemState s(SystemParams{2, 1});
  s.apply_arrivals({1, 1});
  ConnectivityMatrix c(2);
  c.set(0, 0, true);
  c.set(1, 1, true);

  Schedule ok(2);
  ok.assign(0, 0, s.queue(0)[0].seq);
  ok.assign(1, 1, s.queue(1)[0].seq);
  CHECK_NOTHROW(validate_schedule(s, c, ok));

  Schedule off_link(2);
  off_link.assign(1, 0, s.queue(0)[0].seq);  // C_{0,1} is OFF
  CHECK_THROWS_AS(validate_schedule(s, c, off_link), std::invalid_argument);

  Schedule dup(2);
  dup.assign(0, 0, s.queue(0)[0].seq);
  CHECK_THROWS_AS(dup.assign(0, 0, s.queue(0)[0].seq), std::invalid_argument);
}

TEST_CASE("advance_slot ages every packet by one") {
  SystemState s(SystemParams{3, 1});
  s.apply_arrivals({1, 0, 1});
  const auto w0 = s.weight_key(s.queue(0)[0]);
  s.advance_slot();
  CHECK(s.weight_key(s.queue(0)[0]) == w0 + weight_base(s.params()));
  CHECK(s.slot() == 1);
}
