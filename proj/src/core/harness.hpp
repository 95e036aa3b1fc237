#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"

namespace mcsched {

extern const char* const kVersion;

struct CellResult {
  std::string policy;
  int n = 0;
  std::uint64_t seed = 0;
  DelayStats stats;
  double decide_ns_per_slot = 0.0;
  std::uint64_t trace_hash = 0;  // arrivals + connectivity, policy-independent
};

struct RunResult {
  ExperimentConfig cfg;
  std::vector<CellResult> cells;  // sorted by (policy, n, seed)
};

// One full sweep over policies x n x seeds. Cells run independently
// (cfg.threads workers); results are merged in sorted cell order, so output
// is identical for any thread count.
RunResult run_experiment(const ExperimentConfig& cfg);

// results.csv, backlog.csv, manifest.json under cfg.output_dir
void write_run_outputs(const RunResult& rr);

std::uint64_t config_hash(const ExperimentConfig& cfg);

enum class SweepMode { VsN, VsB };
SweepMode parse_sweep_mode(const std::string& text);

// Aggregates seeds per (policy, n). VsN fixes a threshold b and emits
// probability vs n plus the fitted rate-function slope per policy; VsB fixes
// n and emits probability vs b. Writes gnuplot .dat and .csv files.
void figure_sweep(const RunResult& rr, SweepMode mode, std::int64_t fixed);

enum class VerifyCheck { Opf, Mwf, Dominance };
VerifyCheck parse_verify_check(const std::string& text);

struct VerifyReport {
  std::int64_t slots_checked = 0;
  std::int64_t violations = 0;
  std::vector<std::string> notes;  // first few violation sites
};

// Opf/Mwf: every (policy, n, seed) cell re-runs with the per-slot condition
// oracle. Dominance: policies[0] is the dominant policy; all others must have
// their cumulative served set contained in its own at the end of every slot,
// under shared traces.
VerifyReport verify_experiment(const ExperimentConfig& cfg, VerifyCheck check);

struct BenchRow {
  std::string policy;
  int n = 0;
  double us_per_slot = 0.0;
  int iterations = 0;
};

// Per-slot decision cost on a synthetic saturated state (n packets per
// queue). Times decide() only.
std::vector<BenchRow> bench_experiment(const ExperimentConfig& cfg,
                                       double seconds_per_cell = 0.5);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

// log-log least-squares exponent of us_per_slot vs n for one policy
double bench_loglog_slope(const std::vector<BenchRow>& rows, const std::string& policy);

}  // namespace mcsched
