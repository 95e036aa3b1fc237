#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/analysis.hpp"

using namespace mcsched;

namespace {

SystemState aged_state(int n, int age) {
  // one packet in queue 0, aged `age` slots
  SystemState s(SystemParams{n, 1});
  std::vector<int> counts(n, 0);
  counts[0] = 1;
  s.apply_arrivals(counts);
  for (int t = 0; t < age; ++t) s.advance_slot();
  return s;
}

}  // namespace

TEST_CASE("delay stats thresholds use strict inequality") {
  DelayStats st({0, 1, 2, 3}, 0, 1);
  const auto s = aged_state(2, 3);  // W = 3
  st.record_slot(s);
  CHECK(st.exceed_count(0) == 1);
  CHECK(st.exceed_count(1) == 1);
  CHECK(st.exceed_count(2) == 1);
  CHECK(st.exceed_count(3) == 0);  // W > 3 is false
  CHECK(st.max_w_seen() == 3);

  DelayStats empty({0, 1}, 0, 1);
  empty.record_slot(SystemState(SystemParams{2, 1}));
  CHECK(empty.exceed_count(0) == 0);
}

TEST_CASE("delay stats on a hand-built trace with warmup") {
  // ten slots; W(t) = t for t = 0..9 via an aging packet; warmup 4
  DelayStats st({2, 5}, 4, 3);
  SystemState s(SystemParams{1, 1});
  s.apply_arrivals({1});
  for (int t = 0; t < 10; ++t) {
    st.record_slot(s);
    s.advance_slot();
  }
  CHECK(st.recorded_slots() == 6);  // slots with W = 4..9
  // W > 2 on recorded slots 4..9 -> 6; W > 5 on slots 6..9 -> 4
  CHECK(st.exceed_count(0) == 6);
  CHECK(st.exceed_count(1) == 4);
  CHECK(st.p_hat(0) == doctest::Approx(1.0));
  CHECK(st.p_hat(1) == doctest::Approx(4.0 / 6.0));
  // stride-3 backlog samples at slots 0, 3, 6, 9
  REQUIRE(st.backlog_trace().size() == 4);
  CHECK(st.backlog_trace()[2].first == 6);
  CHECK(st.backlog_trace()[2].second == 1);

  // exceed counts never increase in b
  for (std::size_t i = 1; i < st.thresholds().size(); ++i)
    CHECK(st.exceed_count(i) <= st.exceed_count(i - 1));
}

TEST_CASE("delay stats merge accumulates") {
  DelayStats a({1}, 0, 1), b({1}, 0, 1);
  const auto s = aged_state(2, 4);
  a.record_slot(s);
  b.record_slot(s);
  b.record_slot(s);
  a.merge(b);
  CHECK(a.recorded_slots() == 3);
  CHECK(a.exceed_count(0) == 3);
  DelayStats c({2}, 0, 1);
  CHECK_THROWS_AS(a.merge(c), std::invalid_argument);
}

TEST_CASE("rate function fit recovers exact exponentials") {
  std::vector<std::pair<double, double>> probs;
  for (int n = 10; n <= 50; n += 10) probs.emplace_back(n, std::exp(-0.3 * n));
  auto fit = rate_function_estimate(probs);
  CHECK(fit.slope == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(fit.slope_stderr == doctest::Approx(0.0).epsilon(1e-9));

  probs.clear();
  for (int n = 10; n <= 50; n += 10) probs.emplace_back(n, 0.1);
  fit = rate_function_estimate(probs);
  CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));

  // polynomial prefactor: slope still close to the true rate
  probs.clear();
  for (int n = 20; n <= 100; n += 10)
    probs.emplace_back(n, n * n * std::exp(-0.5 * n));
  fit = rate_function_estimate(probs);
  CHECK(std::abs(fit.slope - 0.5) < 0.05);
}

TEST_CASE("rate function fit input validation") {
  std::vector<std::pair<double, double>> probs{{10, 0.5}, {20, 0.1}};
  CHECK_THROWS_AS(rate_function_estimate(probs), std::invalid_argument);
  // censored (zero) cells are excluded, leaving too few points
  probs = {{10, 0.5}, {20, 0.1}, {30, 0.0}, {40, 0.0}};
  CHECK_THROWS_AS(rate_function_estimate(probs), std::invalid_argument);
  probs = {{10, 0.5}, {10, 0.4}, {10, 0.3}};
  CHECK_THROWS_AS(rate_function_estimate(probs), std::invalid_argument);
}

TEST_CASE("I_X formula") {
  CHECK(compute_I_X(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(compute_I_X(0.75) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(compute_I_X(1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(compute_I_X(0.0), std::domain_error);
  CHECK_THROWS_AS(compute_I_X(1.0), std::domain_error);
}

TEST_CASE("I_A matches the Bernoulli closed form") {
  // L = 1: only x = 0 is feasible and I_A(t, 0) = t ln(1/p)
  for (double p : {0.3, 0.5, 0.7}) {
    ArrivalCgf cgf(parse_arrival_model("bernoulli p=" + std::to_string(p)));
    for (int t = 1; t <= 10; ++t) {
      CHECK(compute_I_A(cgf, t, 0.0) ==
            doctest::Approx(t * std::log(1.0 / p)).epsilon(1e-6));
    }
    CHECK(std::isinf(compute_I_A(cgf, 3, 0.5)));
  }
}

TEST_CASE("I_A vanishes at the mean and is monotone convex in x") {
  // batch 2 with symmetric chain: mean rate 1, so x = 0 is mean behavior
  ArrivalCgf unit(parse_arrival_model("markov_burst batch=2 P=0.5,0.5,0.5,0.5"));
  for (int t : {1, 3, 7}) CHECK(compute_I_A(unit, t, 0.0) == doctest::Approx(0.0).epsilon(1e-9));

  ArrivalCgf cgf(parse_arrival_model("markov_burst batch=5 P=0.5,0.5,0.1,0.9"));
  for (int t : {2, 5, 11}) {
    std::vector<double> vals;
    for (double x = 0.0; x <= 4.0 * t - 1.0; x += 0.5)
      vals.push_back(compute_I_A(cgf, t, x));
    for (std::size_t i = 1; i < vals.size(); ++i)
      CHECK(vals[i] >= vals[i - 1] - 1e-9);  // nondecreasing
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i + 1] - vals[i] >= vals[i] - vals[i - 1] - 1e-7);  // convex
  }
}

TEST_CASE("upper bound closed form for L = 1") {
  CHECK(compute_upper_bound({1, 0.75, 2}).value ==
        doctest::Approx(3.0 * std::log(4.0)).epsilon(1e-12));
  CHECK(compute_upper_bound({1, 0.5, 0}).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  for (double q : {0.3, 0.6, 0.9})
    for (int b : {0, 1, 4})
      CHECK(compute_upper_bound({1, q, b}).value ==
            doctest::Approx((b + 1) * compute_I_X(q)).epsilon(1e-12));
}

TEST_CASE("upper bound three-term minimum matches brute force for L = 5") {
  const auto model = parse_arrival_model("markov_burst batch=5 P=0.5,0.5,0.1,0.9");
  ArrivalCgf cgf(model);
  const int L = 5, b = 2;
  const double q = 0.75, ix = compute_I_X(q);

  // fine-grid brute force over (c, t, theta)
  auto brute_ia = [&](int t, double x) {
    if (x > (L - 1) * static_cast<double>(t)) return std::numeric_limits<double>::infinity();
    double best = 0.0;
    for (double th = 0.0; th <= 60.0; th += 0.002)
      best = std::max(best, th * (t + x) - cgf(t, th));
    return best;
  };
  double brute = (b + 1) * ix;
  for (int c = 0; c <= b; ++c) {
    const int x = b - c;
    const double t_x = static_cast<double>(x) / (L - 1);
    for (int t = std::max(1, static_cast<int>(t_x) + 1); t <= 200; ++t)
      brute = std::min(brute, brute_ia(t, x) + c * ix);
    if (x > 0 && x % (L - 1) == 0)
      brute = std::min(brute, brute_ia(x / (L - 1), x) + (c + 1) * ix);
  }

  const auto r = compute_upper_bound({L, q, b, &cgf, 200});
  CHECK(r.value == doctest::Approx(brute).epsilon(1e-4));
  CHECK(r.tail_monotone);
  CHECK(r.value <= r.term_direct);
}

TEST_CASE("upper bound parameter validation") {
  CHECK_THROWS_AS(compute_upper_bound({5, 0.5, 2, nullptr, 200}), std::invalid_argument);
  CHECK_THROWS_AS(compute_upper_bound({1, 0.5, -1}), std::invalid_argument);
  ArrivalCgf cgf(parse_arrival_model("bernoulli p=0.5"));
  CHECK_THROWS_AS(compute_upper_bound({5, 0.5, 2, &cgf, 200}), std::invalid_argument);
  CHECK_THROWS_AS(ArrivalCgf(parse_arrival_model("counterexample K=8 p=0.5")),
                  std::invalid_argument);
}

TEST_CASE("stability metric") {
  std::vector<std::pair<std::int64_t, std::int64_t>> drift, flat;
  for (int t = 0; t < 1000; ++t) {
    drift.emplace_back(t * 10, t);  // 0.1 packets per slot
    flat.emplace_back(t * 10, 0);
  }
  const auto u = stability_metric(drift);
  CHECK(u.slope == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(u.verdict == StabilityVerdict::Unstable);

  const auto s = stability_metric(flat);
  CHECK(s.verdict == StabilityVerdict::Stable);
  CHECK(std::string(to_string(s.verdict)) == "stable");

  // hovering high without returns to zero: inconclusive
  std::vector<std::pair<std::int64_t, std::int64_t>> hover;
  for (int t = 0; t < 1000; ++t) hover.emplace_back(t * 10, 500);
  CHECK(stability_metric(hover).verdict == StabilityVerdict::Inconclusive);

  CHECK_THROWS_AS(stability_metric({{0, 0}}), std::invalid_argument);
}

TEST_CASE("throughput region for n = 2") {
  const auto region = throughput_region_n2(0.5);
  CHECK(region.contains(17.0 / 24.0, 17.0 / 24.0));  // sum 17/12 <= 3/2
  CHECK(region.contains(0.0, 0.0));
  CHECK(!region.contains(1.1, 0.5));  // lambda1 > 2q
  CHECK(!region.contains(0.9, 0.7));  // sum 1.6 > 1.5
  CHECK_THROWS_AS(throughput_region_n2(0.0), std::domain_error);
}
