#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

namespace mcsched {

const char* const kVersion = "0.1.0";

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct CellSpec {
  PolicySpec policy;
  int n;
  std::uint64_t seed;
};

CellResult simulate_cell(const ExperimentConfig& cfg, const CellSpec& cell) {
  const SystemParams params{cell.n, cfg.arrival.arrival_bound()};
  SystemState state(params);
  auto policy = make_policy(cell.policy, params);
  ArrivalProcess arrivals(cfg.arrival, cell.n, cell.seed, 0);
  ChannelProcess channels(cfg.channel, cell.n, cell.seed, 0);
  DelayStats stats(cfg.thresholds, cfg.warmup, cfg.backlog_stride);
  TraceHasher hasher;

  std::int64_t decide_ns = 0;
  for (std::int64_t slot = 0; slot < cfg.horizon; ++slot) {
    const auto counts = arrivals.next();
    hasher.add_counts(counts);
    const auto fresh = state.apply_arrivals(counts);
    policy->observe_arrivals(state, fresh);
    stats.record_slot(state);

    const auto conn = channels.next();
    hasher.add_connectivity(conn);
    const auto t0 = Clock::now();
    const Schedule sched = policy->decide(state, conn);
    decide_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0)
                     .count();
    const auto served = state.apply_schedule(sched);
    policy->observe_service(state, served);
    state.advance_slot();
  }

  CellResult r;
  r.policy = cell.policy.name();
  r.n = cell.n;
  r.seed = cell.seed;
  r.stats = std::move(stats);
  r.decide_ns_per_slot =
      cfg.horizon > 0 ? static_cast<double>(decide_ns) / cfg.horizon : 0.0;
  r.trace_hash = hasher.value();
  return r;
}

std::vector<CellSpec> make_cells(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  for (const auto& ps : cfg.policies)
    for (int n : cfg.n_values)
      for (auto seed : cfg.effective_seeds()) cells.push_back({ps, n, seed});
  std::sort(cells.begin(), cells.end(), [](const CellSpec& a, const CellSpec& b) {
    if (a.policy.name() != b.policy.name()) return a.policy.name() < b.policy.name();
    if (a.n != b.n) return a.n < b.n;
    return a.seed < b.seed;
  });
  return cells;
}

void require_valid(const ExperimentConfig& cfg) {
  const auto bad = cfg.validate();
  if (bad.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& v : bad) msg += "\n  - " + v;
  throw std::invalid_argument(msg);
}

// packs packet identity independent of per-state seq numbering
std::uint64_t packet_key(const Packet& p, int n, int L) {
  return (static_cast<std::uint64_t>(p.arrival_slot) * n + p.queue) *
             static_cast<std::uint64_t>(L + 1) +
         p.slot_order;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  require_valid(cfg);
  const auto cells = make_cells(cfg);
  RunResult rr;
  rr.cfg = cfg;
  rr.cells.resize(cells.size());

  const int workers =
      std::max(1, std::min<int>(cfg.threads, static_cast<int>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      rr.cells[i] = simulate_cell(cfg, cells[i]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t i = w; i < cells.size(); i += workers)
          rr.cells[i] = simulate_cell(cfg, cells[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  if (cfg.coupled) {
    // policy-independent traces: all policies must see identical sample paths
    // per (n, seed)
    std::map<std::pair<int, std::uint64_t>, std::uint64_t> expect;
    for (const auto& c : rr.cells) {
      auto key = std::make_pair(c.n, c.seed);
      auto [it, fresh] = expect.emplace(key, c.trace_hash);
      if (!fresh && it->second != c.trace_hash)
        throw std::runtime_error("coupled traces diverged across policies");
    }
  }
  return rr;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : cfg.canonical_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_run_outputs(const RunResult& rr) {
  const fs::path dir(rr.cfg.output_dir);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "results.csv");
    out << "policy,n,seed,b,recorded_slots,exceed_count,p_hat,censored\n";
    for (const auto& c : rr.cells) {
      const auto& st = c.stats;
      for (std::size_t i = 0; i < st.thresholds().size(); ++i) {
        out << c.policy << ',' << c.n << ',' << c.seed << ',' << st.thresholds()[i]
            << ',' << st.recorded_slots() << ',' << st.exceed_count(i) << ','
            << std::setprecision(12) << st.p_hat(i) << ',' << (st.censored(i) ? 1 : 0)
            << '\n';
      }
    }
  }
  {
    std::ofstream out(dir / "backlog.csv");
    out << "policy,n,seed,slot,backlog\n";
    for (const auto& c : rr.cells)
      for (const auto& [slot, backlog] : c.stats.backlog_trace())
        out << c.policy << ',' << c.n << ',' << c.seed << ',' << slot << ','
            << backlog << '\n';
  }
  {
    nlohmann::ordered_json m;
    m["name"] = rr.cfg.name;
    m["version"] = kVersion;
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(rr.cfg);
    m["config_hash"] = hash.str();
    m["config"] = rr.cfg.canonical_text();
    m["seeds"] = rr.cfg.effective_seeds();
    auto& cells = m["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : rr.cells) {
      std::ostringstream th;
      th << std::hex << std::setw(16) << std::setfill('0') << c.trace_hash;
      cells.push_back({{"policy", c.policy},
                       {"n", c.n},
                       {"seed", c.seed},
                       {"trace_hash", th.str()},
                       {"max_w_seen", c.stats.max_w_seen()}});
    }
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << '\n';
  }
  {
    // wall-clock data is inherently nondeterministic, so it lives outside
    // the reproducible outputs
    std::ofstream out(dir / "timing.csv");
    out << "policy,n,seed,decide_ns_per_slot\n";
    for (const auto& c : rr.cells)
      out << c.policy << ',' << c.n << ',' << c.seed << ','
          << std::setprecision(9) << c.decide_ns_per_slot << '\n';
  }
}

SweepMode parse_sweep_mode(const std::string& text) {
  if (text == "vs_n") return SweepMode::VsN;
  if (text == "vs_b") return SweepMode::VsB;
  throw std::invalid_argument("sweep mode must be vs_n or vs_b");
}

void figure_sweep(const RunResult& rr, SweepMode mode, std::int64_t fixed) {
  const fs::path dir(rr.cfg.output_dir);
  fs::create_directories(dir);

  // merge seeds: (policy, n) -> stats
  std::map<std::pair<std::string, int>, DelayStats> agg;
  for (const auto& c : rr.cells) {
    auto key = std::make_pair(c.policy, c.n);
    auto it = agg.find(key);
    if (it == agg.end())
      agg.emplace(key, c.stats);
    else
      it->second.merge(c.stats);
  }

  const auto& th = rr.cfg.thresholds;
  if (mode == SweepMode::VsN) {
    const auto bit = std::find(th.begin(), th.end(), fixed);
    if (bit == th.end())
      throw std::invalid_argument("vs_n: b=" + std::to_string(fixed) +
                                  " is not a configured threshold");
    const std::size_t bi = static_cast<std::size_t>(bit - th.begin());

    const std::string stem = rr.cfg.name + "_vs_n_b" + std::to_string(fixed);
    std::ofstream csv(dir / (stem + ".csv"));
    std::ofstream dat(dir / (stem + ".dat"));
    std::ofstream fits(dir / (stem + "_fit.csv"));
    csv << "policy,n,p_hat,censored\n";
    fits << "policy,slope,slope_stderr,points_used\n";
    std::string cur;
    std::vector<std::pair<double, double>> pts;
    auto flush_fit = [&]() {
      if (cur.empty()) return;
      try {
        const auto fit = rate_function_estimate(pts);
        fits << cur << ',' << fit.slope << ',' << fit.slope_stderr << ','
             << fit.points_used << '\n';
        dat << "# " << cur << " slope=" << fit.slope
            << " stderr=" << fit.slope_stderr << '\n';
      } catch (const std::exception& e) {
        fits << cur << ",,,0\n";
        dat << "# " << cur << " fit unavailable: " << e.what() << '\n';
      }
      dat << "\n\n";
      pts.clear();
    };
    for (const auto& [key, st] : agg) {
      if (key.first != cur) {
        flush_fit();
        cur = key.first;
        dat << "# policy " << cur << ": n p_hat censored\n";
      }
      csv << key.first << ',' << key.second << ',' << std::setprecision(12)
          << st.p_hat(bi) << ',' << (st.censored(bi) ? 1 : 0) << '\n';
      dat << key.second << ' ' << std::setprecision(12) << st.p_hat(bi) << ' '
          << (st.censored(bi) ? 1 : 0) << '\n';
      pts.emplace_back(static_cast<double>(key.second), st.p_hat(bi));
    }
    flush_fit();
    return;
  }

  const int n_fixed = static_cast<int>(fixed);
  bool have_n = false;
  for (const auto& [key, st] : agg) have_n = have_n || key.second == n_fixed;
  if (!have_n)
    throw std::invalid_argument("vs_b: n=" + std::to_string(fixed) +
                                " was not part of the run");
  const std::string stem = rr.cfg.name + "_vs_b_n" + std::to_string(fixed);
  std::ofstream csv(dir / (stem + ".csv"));
  std::ofstream dat(dir / (stem + ".dat"));
  csv << "policy,b,p_hat,censored\n";
  for (const auto& [key, st] : agg) {
    if (key.second != n_fixed) continue;
    dat << "# policy " << key.first << ": b p_hat censored\n";
    for (std::size_t i = 0; i < th.size(); ++i) {
      csv << key.first << ',' << th[i] << ',' << std::setprecision(12) << st.p_hat(i)
          << ',' << (st.censored(i) ? 1 : 0) << '\n';
      dat << th[i] << ' ' << std::setprecision(12) << st.p_hat(i) << ' '
          << (st.censored(i) ? 1 : 0) << '\n';
    }
    dat << "\n\n";
  }
}

VerifyCheck parse_verify_check(const std::string& text) {
  if (text == "opf") return VerifyCheck::Opf;
  if (text == "mwf") return VerifyCheck::Mwf;
  if (text == "dominance") return VerifyCheck::Dominance;
  throw std::invalid_argument("check must be opf, mwf or dominance");
}

namespace {

VerifyReport verify_condition(const ExperimentConfig& cfg, VerifyCheck check) {
  VerifyReport rep;
  for (const auto& ps : cfg.policies) {
    for (int n : cfg.n_values) {
      for (auto seed : cfg.effective_seeds()) {
        const SystemParams params{n, cfg.arrival.arrival_bound()};
        SystemState state(params);
        auto policy = make_policy(ps, params);
        ArrivalProcess arrivals(cfg.arrival, n, seed, 0);
        ChannelProcess channels(cfg.channel, n, seed, 0);
        for (std::int64_t slot = 0; slot < cfg.horizon; ++slot) {
          const auto fresh = state.apply_arrivals(arrivals.next());
          policy->observe_arrivals(state, fresh);
          const auto conn = channels.next();
          const Schedule sched = policy->decide(state, conn);
          validate_schedule(state, conn, sched);
          const bool ok = check == VerifyCheck::Opf
                              ? opf_condition_check(state, conn, sched)
                              : mwf_condition_check(state, conn, sched, n);
          ++rep.slots_checked;
          if (!ok) {
            ++rep.violations;
            if (rep.notes.size() < 10) {
              std::ostringstream note;
              note << "policy=" << ps.name() << " n=" << n << " seed=" << seed
                   << " slot=" << slot;
              rep.notes.push_back(note.str());
            }
          }
          const auto served = state.apply_schedule(sched);
          policy->observe_service(state, served);
          state.advance_slot();
        }
      }
    }
  }
  return rep;
}

VerifyReport verify_dominance(const ExperimentConfig& cfg) {
  if (cfg.policies.size() < 2)
    throw std::invalid_argument("dominance check needs >= 2 policies");
  VerifyReport rep;
  const int L = cfg.arrival.arrival_bound();
  for (int n : cfg.n_values) {
    for (auto seed : cfg.effective_seeds()) {
      const SystemParams params{n, L};
      const std::size_t k = cfg.policies.size();
      std::vector<SystemState> states(k, SystemState(params));
      std::vector<std::unique_ptr<Policy>> policies;
      for (const auto& ps : cfg.policies) policies.push_back(make_policy(ps, params));

      std::unordered_set<std::uint64_t> dom_served;
      // packets the subordinate served that the dominant has not served yet
      std::vector<std::unordered_set<std::uint64_t>> pending(k);

      ArrivalProcess arrivals(cfg.arrival, n, seed, 0);
      ChannelProcess channels(cfg.channel, n, seed, 0);
      for (std::int64_t slot = 0; slot < cfg.horizon; ++slot) {
        const auto counts = arrivals.next();
        const auto conn = channels.next();
        for (std::size_t i = 0; i < k; ++i) {
          const auto fresh = states[i].apply_arrivals(counts);
          policies[i]->observe_arrivals(states[i], fresh);
          const Schedule sched = policies[i]->decide(states[i], conn);
          const auto served = states[i].apply_schedule(sched);
          policies[i]->observe_service(states[i], served);
          for (const auto& p : served) {
            const auto key = packet_key(p, n, L);
            if (i == 0) {
              dom_served.insert(key);
              for (std::size_t j = 1; j < k; ++j) pending[j].erase(key);
            } else if (!dom_served.count(key)) {
              pending[i].insert(key);
            }
          }
          states[i].advance_slot();
        }
        ++rep.slots_checked;
        for (std::size_t j = 1; j < k; ++j) {
          if (!pending[j].empty()) {
            ++rep.violations;
            if (rep.notes.size() < 10) {
              std::ostringstream note;
              note << "policy=" << cfg.policies[j].name() << " n=" << n
                   << " seed=" << seed << " slot=" << slot << " missing="
                   << pending[j].size();
              rep.notes.push_back(note.str());
            }
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace

VerifyReport verify_experiment(const ExperimentConfig& cfg, VerifyCheck check) {
  require_valid(cfg);
  if (check == VerifyCheck::Dominance) return verify_dominance(cfg);
  return verify_condition(cfg, check);
}

std::vector<BenchRow> bench_experiment(const ExperimentConfig& cfg,
                                       double seconds_per_cell) {
  require_valid(cfg);
  std::vector<BenchRow> rows;
  const int L = cfg.arrival.arrival_bound();
  for (const auto& ps : cfg.policies) {
    for (int n : cfg.n_values) {
      const SystemParams params{n, L};
      SystemState state(params);
      auto policy = make_policy(ps, params);
      // saturated synthetic backlog: n slots of one arrival per queue
      const std::vector<int> ones(static_cast<std::size_t>(n), 1);
      for (int s = 0; s < n; ++s) {
        const auto fresh = state.apply_arrivals(ones);
        policy->observe_arrivals(state, fresh);
        state.advance_slot();
      }
      ChannelProcess channels(cfg.channel, n, 1, 0);
      std::vector<ConnectivityMatrix> conns;
      for (int i = 0; i < 16; ++i) conns.push_back(channels.next());

      // warm up, then time decide() alone on the frozen state
      for (int i = 0; i < 3; ++i) (void)policy->decide(state, conns[i]);
      const auto deadline =
          Clock::now() + std::chrono::duration<double>(seconds_per_cell);
      int iters = 0;
      std::int64_t ns = 0;
      while (iters < 5 || (Clock::now() < deadline && iters < 200000)) {
        const auto& conn = conns[iters % conns.size()];
        const auto t0 = Clock::now();
        (void)policy->decide(state, conn);
        ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0)
                  .count();
        ++iters;
      }
      rows.push_back({ps.name(), n, static_cast<double>(ns) / iters / 1000.0, iters});
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  out << "policy,n,us_per_slot,iterations\n";
  for (const auto& r : rows)
    out << r.policy << ',' << r.n << ',' << std::setprecision(9) << r.us_per_slot
        << ',' << r.iterations << '\n';
}

double bench_loglog_slope(const std::vector<BenchRow>& rows, const std::string& policy) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.policy == policy && r.us_per_slot > 0)
      pts.emplace_back(std::log(static_cast<double>(r.n)), std::log(r.us_per_slot));
  if (pts.size() < 2)
    throw std::invalid_argument("bench_loglog_slope: need >= 2 points for " + policy);
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double m = static_cast<double>(pts.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxy / sxx;
}

}  // namespace mcsched
