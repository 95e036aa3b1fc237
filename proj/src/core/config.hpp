#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "policies.hpp"
#include "traffic.hpp"

namespace mcsched {

// Flat key = value experiment description. Repeated `policy` lines build the
// policy list; list-valued keys take comma-separated values.
struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<PolicySpec> policies;
  std::vector<int> n_values;
  ArrivalModel arrival;
  ChannelModel channel;
  std::int64_t horizon = 1'000'000;
  std::int64_t warmup = 10'000;
  std::vector<std::int64_t> thresholds{0, 1, 2};
  std::uint64_t seed_base = 1;
  int replications = 1;
  std::vector<std::uint64_t> seeds;  // explicit list overrides seed/replications
  bool coupled = false;
  std::string output_dir = "out";
  std::int64_t backlog_stride = 100;
  int threads = 1;

  std::vector<std::uint64_t> effective_seeds() const;
  // every violated constraint, empty when valid
  std::vector<std::string> validate() const;
  // canonical text form; hashing this identifies the experiment
  std::string canonical_text() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// applies a single "key = value" override line
void apply_config_line(ExperimentConfig& cfg, const std::string& line);

}  // namespace mcsched
