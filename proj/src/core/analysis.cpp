#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp2(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

}  // namespace

DelayStats::DelayStats(std::vector<std::int64_t> thresholds, std::int64_t warmup,
                       std::int64_t backlog_stride)
    : thresholds_(std::move(thresholds)),
      exceed_counts_(thresholds_.size(), 0),
      warmup_(warmup),
      backlog_stride_(backlog_stride > 0 ? backlog_stride : 1) {
  if (!std::is_sorted(thresholds_.begin(), thresholds_.end()))
    throw std::invalid_argument("DelayStats: thresholds must be ascending");
}

void DelayStats::record_slot(const SystemState& s) {
  const std::int64_t w = s.max_hol_delay();
  if (seen_ % backlog_stride_ == 0)
    backlog_trace_.emplace_back(s.slot(), s.total_backlog());
  ++seen_;
  if (seen_ <= warmup_) return;
  ++recorded_;
  max_w_ = std::max(max_w_, w);
  for (std::size_t i = 0; i < thresholds_.size(); ++i)
    if (w > thresholds_[i]) ++exceed_counts_[i];
}

double DelayStats::p_hat(std::size_t idx) const {
  if (recorded_ == 0) return 0.0;
  return static_cast<double>(exceed_counts_[idx]) / static_cast<double>(recorded_);
}

void DelayStats::merge(const DelayStats& other) {
  if (thresholds_ != other.thresholds_)
    throw std::invalid_argument("DelayStats::merge: threshold mismatch");
  for (std::size_t i = 0; i < exceed_counts_.size(); ++i)
    exceed_counts_[i] += other.exceed_counts_[i];
  seen_ += other.seen_;
  recorded_ += other.recorded_;
  max_w_ = std::max(max_w_, other.max_w_);
  backlog_trace_.insert(backlog_trace_.end(), other.backlog_trace_.begin(),
                        other.backlog_trace_.end());
  std::sort(backlog_trace_.begin(), backlog_trace_.end());
}

FitResult rate_function_estimate(const std::vector<std::pair<double, double>>& probs) {
  std::vector<std::pair<double, double>> pts;  // (n, -log p)
  for (const auto& [n, p] : probs)
    if (p > 0.0) pts.emplace_back(n, -std::log(p));
  const int m = static_cast<int>(pts.size());
  if (m < 3)
    throw std::invalid_argument(
        "rate_function_estimate: need >= 3 points with nonzero probability");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("rate_function_estimate: need distinct n values");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.points_used = m;
  double sse = 0;
  for (const auto& [x, y] : pts) {
    const double e = y - (r.intercept + r.slope * x);
    sse += e * e;
  }
  if (m > 2) r.slope_stderr = std::sqrt(sse / (m - 2) / sxx);
  return r;
}

double compute_I_X(double q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("compute_I_X: q must be in (0,1)");
  return -std::log1p(-q);
}

ArrivalCgf::ArrivalCgf(const ArrivalModel& model) : model_(model) {
  if (model_.kind == ArrivalModel::Kind::Counterexample)
    throw std::invalid_argument("ArrivalCgf: counterexample arrivals unsupported");
}

double ArrivalCgf::operator()(int t, double theta) const {
  if (t < 1) throw std::invalid_argument("ArrivalCgf: t must be >= 1");
  if (model_.kind == ArrivalModel::Kind::Bernoulli)
    return t * std::log1p(model_.p * std::expm1(theta));

  // MarkovBurst: A(t) = batch * (slots spent in the ON state), chain started
  // stationary. E[e^{theta A}] via the theta-tilted transition product, in
  // log space for numeric range.
  const double a_on = theta * model_.batch;
  const double p_on = stationary_p0(model_.trans);
  double lp[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) lp[i][j] = safe_log(model_.trans[i][j]);
  double v[2] = {safe_log(p_on) + a_on, safe_log(1.0 - p_on)};
  for (int step = 1; step < t; ++step) {
    double w[2];
    for (int j = 0; j < 2; ++j)
      w[j] = logsumexp2(v[0] + lp[0][j], v[1] + lp[1][j]) + (j == 0 ? a_on : 0.0);
    v[0] = w[0];
    v[1] = w[1];
  }
  return logsumexp2(v[0], v[1]);
}

double compute_I_A(const ArrivalCgf& cgf, int t, double x) {
  if (t < 1) throw std::invalid_argument("compute_I_A: t must be >= 1");
  if (x < 0.0) throw std::invalid_argument("compute_I_A: x must be >= 0");
  const int L = cgf.arrival_bound();
  if (x > static_cast<double>(L - 1) * t + 1e-12) return kInf;

  const auto f = [&](double theta) { return theta * (t + x) - cgf(t, theta); };

  // concave in theta; golden-section maximize, then compare with theta = 0.
  // The sup can sit at theta -> inf (boundary x = (L-1)t); truncating at
  // theta_max leaves an O(e^{-theta_max}) error.
  double lo = 0.0, hi = 60.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120; ++it) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = f(d);
    } else {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = f(c);
    }
  }
  return std::max({0.0, fc, fd, f(60.0)});
}

BoundResult compute_upper_bound(const BoundParams& bp) {
  if (bp.b < 0) throw std::invalid_argument("compute_upper_bound: b must be >= 0");
  if (bp.L < 1) throw std::invalid_argument("compute_upper_bound: L must be >= 1");
  const double ix = compute_I_X(bp.q);
  BoundResult r;
  r.t_max = bp.t_max;
  r.term_direct = (bp.b + 1) * ix;
  r.term_inf = kInf;
  r.term_psi = kInf;
  if (bp.L == 1) {
    r.value = r.term_direct;
    return r;
  }
  if (bp.cgf == nullptr)
    throw std::invalid_argument("compute_upper_bound: cgf required for L > 1");
  const ArrivalCgf& cgf = *bp.cgf;
  if (cgf.arrival_bound() != bp.L)
    throw std::invalid_argument("compute_upper_bound: cgf arrival bound != L");

  for (int c = 0; c <= bp.b; ++c) {
    const int x = bp.b - c;
    const double t_x = static_cast<double>(x) / (bp.L - 1);

    // inf over integer t strictly above t_x, truncated at t_max
    const int t_lo = std::max(1, static_cast<int>(std::floor(t_x)) + 1);
    double best = kInf;
    double prev = -kInf;
    for (int t = t_lo; t <= bp.t_max; ++t) {
      const double v = compute_I_A(cgf, t, x);
      best = std::min(best, v);
      if (t > bp.t_max - 10) {
        if (v + 1e-9 < prev) r.tail_monotone = false;
        prev = v;
      }
    }
    r.term_inf = std::min(r.term_inf, best + c * ix);

    // Psi_b: t_{b-c} a positive integer
    if (x > 0 && x % (bp.L - 1) == 0) {
      const int t_exact = x / (bp.L - 1);
      r.term_psi =
          std::min(r.term_psi, compute_I_A(cgf, t_exact, x) + (c + 1) * ix);
    }
  }
  r.value = std::min({r.term_direct, r.term_inf, r.term_psi});
  return r;
}

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

StabilityResult stability_metric(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& trace,
    double slope_eps, std::int64_t near_zero, std::int64_t min_returns) {
  if (trace.size() < 100)
    throw std::invalid_argument("stability_metric: need >= 100 trace samples");
  double sx = 0, sy = 0;
  for (const auto& [t, b] : trace) {
    sx += static_cast<double>(t);
    sy += static_cast<double>(b);
  }
  const double m = static_cast<double>(trace.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [t, b] : trace) {
    const double dx = static_cast<double>(t) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(b) - my);
  }
  StabilityResult r;
  r.slope = sxx > 0 ? sxy / sxx : 0.0;
  for (const auto& [t, b] : trace)
    if (b < near_zero) ++r.near_zero_returns;
  if (r.slope > slope_eps)
    r.verdict = StabilityVerdict::Unstable;
  else if (r.near_zero_returns >= min_returns)
    r.verdict = StabilityVerdict::Stable;
  else
    r.verdict = StabilityVerdict::Inconclusive;
  return r;
}

bool ThroughputRegionN2::contains(double lambda1, double lambda2) const {
  const double eps = 1e-12;
  return lambda1 <= 2 * q + eps && lambda2 <= 2 * q + eps &&
         lambda1 + lambda2 <= 2 * (2 * q - q * q) + eps;
}

ThroughputRegionN2 throughput_region_n2(double q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("throughput_region_n2: q must be in (0,1)");
  return ThroughputRegionN2{q};
}

}  // namespace mcsched
