#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "system_state.hpp"
#include "traffic.hpp"

namespace mcsched {

// Per-run delay and backlog accumulator. Sampled once per slot after arrivals
// and before service.
class DelayStats {
 public:
  DelayStats() = default;
  DelayStats(std::vector<std::int64_t> thresholds, std::int64_t warmup,
             std::int64_t backlog_stride);

  void record_slot(const SystemState& s);

  const std::vector<std::int64_t>& thresholds() const { return thresholds_; }
  std::int64_t exceed_count(std::size_t idx) const { return exceed_counts_[idx]; }
  std::int64_t recorded_slots() const { return recorded_; }
  std::int64_t max_w_seen() const { return max_w_; }
  // empirical P(W > b); censored (zero count) cells still return 0 here,
  // callers must consult censored()
  double p_hat(std::size_t idx) const;
  bool censored(std::size_t idx) const { return exceed_counts_[idx] == 0; }

  // (slot, total backlog) samples at the configured stride, warmup included
  const std::vector<std::pair<std::int64_t, std::int64_t>>& backlog_trace() const {
    return backlog_trace_;
  }

  // order-independent accumulation across replications of equal shape
  void merge(const DelayStats& other);

 private:
  std::vector<std::int64_t> thresholds_;
  std::vector<std::int64_t> exceed_counts_;
  std::int64_t warmup_ = 0;
  std::int64_t backlog_stride_ = 100;
  std::int64_t seen_ = 0;      // total slots observed
  std::int64_t recorded_ = 0;  // post-warmup slots
  std::int64_t max_w_ = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> backlog_trace_;
};

// ---- rate-function estimation ---------------------------------------------

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points_used = 0;
};

// Least-squares fit of -log p over n. Points with p <= 0 are censored and
// skipped. Throws std::invalid_argument with fewer than 3 usable points.
FitResult rate_function_estimate(const std::vector<std::pair<double, double>>& probs);

// ---- upper bound ----------------------------------------------------------

// I_X = log 1/(1-q); q must be in (0,1)
double compute_I_X(double q);

// log E[exp(theta * A(t slots))] for one user's arrivals, exact per model.
// Counterexample arrivals are unsupported and throw.
class ArrivalCgf {
 public:
  explicit ArrivalCgf(const ArrivalModel& model);

  double operator()(int t, double theta) const;
  double mean_rate() const { return model_.mean_rate(); }
  int arrival_bound() const { return model_.arrival_bound(); }

 private:
  ArrivalModel model_;
};

// I_A(t, x) = sup_{theta >= 0} [theta (t + x) - cgf(t, theta)].
// Returns +inf when x > (L-1) t (no t-slot sample path can reach t + x).
double compute_I_A(const ArrivalCgf& cgf, int t, double x);

struct BoundParams {
  int L = 1;
  double q = 0.5;
  int b = 0;
  const ArrivalCgf* cgf = nullptr;  // required when L > 1
  int t_max = 200;                  // truncation of the inf over t
};

struct BoundResult {
  double value = 0.0;
  double term_direct = 0.0;  // (b+1) I_X
  double term_inf = 0.0;     // min_c inf_{t > t_{b-c}} I_A + c I_X
  double term_psi = 0.0;     // min_{c in Psi_b} I_A(t_{b-c}, b-c) + (c+1) I_X
  int t_max = 0;
  bool tail_monotone = true;  // I_A nondecreasing in t near t_max, all c
};

BoundResult compute_upper_bound(const BoundParams& bp);

// ---- stability ------------------------------------------------------------

enum class StabilityVerdict { Stable, Unstable, Inconclusive };

struct StabilityResult {
  double slope = 0.0;  // backlog drift per slot
  StabilityVerdict verdict = StabilityVerdict::Inconclusive;
  std::int64_t near_zero_returns = 0;
};

const char* to_string(StabilityVerdict v);

// Least-squares drift over a (slot, backlog) trace; needs >= 100 samples.
StabilityResult stability_metric(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& trace,
    double slope_eps = 0.01, std::int64_t near_zero = 50,
    std::int64_t min_returns = 100);

// Closed-form optimal throughput region for n = 2 i.i.d. ON/OFF channels.
struct ThroughputRegionN2 {
  double q = 0.5;
  bool contains(double lambda1, double lambda2) const;
};

ThroughputRegionN2 throughput_region_n2(double q);

}  // namespace mcsched
