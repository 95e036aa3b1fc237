#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/harness.hpp"

using namespace mcsched;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig small_config(const std::string& dir) {
  return parse_config_text(
      "name = unit\n"
      "policy = dwm_n\n"
      "policy = d_mws\n"
      "n = 2,3\n"
      "arrival = bernoulli p=0.4\n"
      "channel = iid q=0.6\n"
      "horizon = 400\n"
      "warmup = 100\n"
      "thresholds = 0,1,2\n"
      "seeds = 1,2\n"
      "backlog_stride = 50\n"
      "output_dir = " + dir + "\n");
}

}  // namespace

TEST_CASE("config parsing and validation") {
  auto cfg = small_config("tmp_out");
  CHECK(cfg.name == "unit");
  CHECK(cfg.policies.size() == 2);
  CHECK(cfg.n_values == std::vector<int>{2, 3});
  CHECK(cfg.effective_seeds() == std::vector<std::uint64_t>{1, 2});
  CHECK(cfg.validate().empty());

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("policy dwm\n"), std::invalid_argument);

  // every violation is reported, not just the first
  cfg.n_values.clear();
  cfg.warmup = 1000;
  cfg.policies.clear();
  const auto bad = cfg.validate();
  CHECK(bad.size() >= 3);

  // counterexample arrivals force n = 2
  auto ce = parse_config_text(
      "policy = dwm_n\nn = 2,4\narrival = counterexample K=8 p=0.1\n"
      "horizon = 10\nwarmup = 0\n");
  CHECK(!ce.validate().empty());
  ce.n_values = {2};
  CHECK(ce.validate().empty());
}

TEST_CASE("seed base and replications derive seed lists") {
  auto cfg = parse_config_text("seed = 7\nreplications = 3\n");
  CHECK(cfg.effective_seeds() == std::vector<std::uint64_t>{7, 8, 9});
}

TEST_CASE("canonical text round trips") {
  const auto cfg = parse_config_text(
      "policy = fbs h=2 analysis\npolicy = hybrid\nn = 8\n"
      "arrival = markov_burst batch=2 P=0.5,0.5,0.5,0.5\nchannel = iid q=0.75\n");
  const auto round = parse_config_text(cfg.canonical_text());
  CHECK(round.canonical_text() == cfg.canonical_text());
  CHECK(round.policies[0].fbs_h == 2);
  CHECK(round.policies[0].analysis_variant);
}

TEST_CASE("run_experiment is deterministic and threads-invariant") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_a").string());
  const auto r1 = run_experiment(cfg);
  cfg.threads = 3;
  const auto r2 = run_experiment(cfg);
  REQUIRE(r1.cells.size() == r2.cells.size());
  REQUIRE(r1.cells.size() == 2 * 2 * 2);
  for (std::size_t i = 0; i < r1.cells.size(); ++i) {
    CHECK(r1.cells[i].policy == r2.cells[i].policy);
    CHECK(r1.cells[i].trace_hash == r2.cells[i].trace_hash);
    for (std::size_t b = 0; b < 3; ++b)
      CHECK(r1.cells[i].stats.exceed_count(b) == r2.cells[i].stats.exceed_count(b));
  }
}

TEST_CASE("coupled runs share traces across policies") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_b").string());
  cfg.coupled = true;
  const auto rr = run_experiment(cfg);
  for (const auto& a : rr.cells)
    for (const auto& b : rr.cells)
      if (a.n == b.n && a.seed == b.seed) CHECK(a.trace_hash == b.trace_hash);
}

TEST_CASE("outputs are byte-identical across reruns") {
  const auto dir = fs::temp_directory_path() / "mcs_unit_c";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  write_run_outputs(run_experiment(cfg));
  const auto results1 = slurp(dir / "results.csv");
  const auto backlog1 = slurp(dir / "backlog.csv");
  const auto manifest1 = slurp(dir / "manifest.json");
  write_run_outputs(run_experiment(cfg));
  CHECK(slurp(dir / "results.csv") == results1);
  CHECK(slurp(dir / "backlog.csv") == backlog1);
  CHECK(slurp(dir / "manifest.json") == manifest1);
  CHECK(results1.find("policy,n,seed,b,") == 0);
  CHECK(manifest1.find("config_hash") != std::string::npos);
}

TEST_CASE("zero horizon produces empty stats but valid outputs") {
  const auto dir = fs::temp_directory_path() / "mcs_unit_d";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  cfg.horizon = 0;
  cfg.warmup = 0;
  const auto rr = run_experiment(cfg);
  for (const auto& c : rr.cells) CHECK(c.stats.recorded_slots() == 0);
  write_run_outputs(rr);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("figure sweep emits vs_n and vs_b files") {
  const auto dir = fs::temp_directory_path() / "mcs_unit_e";
  fs::remove_all(dir);
  auto cfg = small_config(dir.string());
  const auto rr = run_experiment(cfg);
  figure_sweep(rr, SweepMode::VsN, 1);
  figure_sweep(rr, SweepMode::VsB, 2);
  CHECK(fs::exists(dir / "unit_vs_n_b1.csv"));
  CHECK(fs::exists(dir / "unit_vs_n_b1.dat"));
  CHECK(fs::exists(dir / "unit_vs_n_b1_fit.csv"));
  CHECK(fs::exists(dir / "unit_vs_b_n2.csv"));
  CHECK_THROWS_AS(figure_sweep(rr, SweepMode::VsN, 9), std::invalid_argument);
  CHECK_THROWS_AS(figure_sweep(rr, SweepMode::VsB, 9), std::invalid_argument);
}

TEST_CASE("verify reports zero violations for conforming policies") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_f").string());
  cfg.policies = {parse_policy_spec("dwm_n"), parse_policy_spec("hybrid")};
  cfg.n_values = {3};
  cfg.horizon = 300;
  const auto opf = verify_experiment(cfg, VerifyCheck::Opf);
  CHECK(opf.slots_checked == 2 * 2 * 300);
  CHECK(opf.violations == 0);

  cfg.policies = {parse_policy_spec("d_mws"), parse_policy_spec("hybrid")};
  const auto mwf = verify_experiment(cfg, VerifyCheck::Mwf);
  CHECK(mwf.violations == 0);
}

TEST_CASE("dominance verification") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_g").string());
  cfg.policies = {parse_policy_spec("dwm_n"), parse_policy_spec("pm analysis")};
  cfg.n_values = {3};
  cfg.horizon = 500;
  const auto rep = verify_experiment(cfg, VerifyCheck::Dominance);
  CHECK(rep.violations == 0);
  CHECK(rep.slots_checked == 2 * 500);

  // the reverse direction must be caught: pm(analysis) does not dominate
  cfg.policies = {parse_policy_spec("pm analysis"), parse_policy_spec("dwm_n")};
  const auto rev = verify_experiment(cfg, VerifyCheck::Dominance);
  CHECK(rev.violations > 0);

  cfg.policies = {parse_policy_spec("dwm_n")};
  CHECK_THROWS_AS(verify_experiment(cfg, VerifyCheck::Dominance),
                  std::invalid_argument);
}

TEST_CASE("bench produces positive timings and a csv") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_h").string());
  cfg.policies = {parse_policy_spec("dwm_n")};
  cfg.n_values = {4, 8};
  const auto rows = bench_experiment(cfg, 0.02);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.us_per_slot > 0.0);
    CHECK(r.iterations >= 5);
  }
  const auto path = fs::temp_directory_path() / "mcs_unit_h" / "bench.csv";
  write_bench_csv(rows, path.string());
  CHECK(slurp(path).find("policy,n,us_per_slot") == 0);
  CHECK(bench_loglog_slope(rows, "dwm_n") > -10.0);  // defined and finite
  CHECK_THROWS_AS(bench_loglog_slope(rows, "nope"), std::invalid_argument);
}

TEST_CASE("invalid config is rejected with every violation listed") {
  auto cfg = small_config((fs::temp_directory_path() / "mcs_unit_i").string());
  cfg.warmup = 1000;  // exceeds horizon
  cfg.n_values = {};
  try {
    run_experiment(cfg);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("warmup") != std::string::npos);
    CHECK(msg.find("n list") != std::string::npos);
  }
}

TEST_CASE("mode and check parsing") {
  CHECK(parse_sweep_mode("vs_n") == SweepMode::VsN);
  CHECK(parse_verify_check("dominance") == VerifyCheck::Dominance);
  CHECK_THROWS_AS(parse_sweep_mode("vs_x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_verify_check("x"), std::invalid_argument);
}
