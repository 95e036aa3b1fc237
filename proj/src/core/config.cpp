#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcsched {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& csv, T (*conv)(const std::string&)) {
  std::vector<T> out;
  std::istringstream in(csv);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(conv(cell));
  }
  return out;
}

int to_int(const std::string& s) { return std::stoi(s); }
std::int64_t to_i64(const std::string& s) { return std::stoll(s); }
std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected boolean, got: " + s);
}

// parse_policy_spec-compatible form (name() is not, e.g. "fbs_h2")
std::string spec_string(const PolicySpec& ps) {
  std::string out;
  switch (ps.kind) {
    case PolicyKind::DWM: out = "dwm"; break;
    case PolicyKind::DWM_N: out = "dwm_n"; break;
    case PolicyKind::D_MWS: out = "d_mws"; break;
    case PolicyKind::HYBRID_DWMN_MWS: out = "hybrid"; break;
    case PolicyKind::FBS: out = "fbs h=" + std::to_string(ps.fbs_h); break;
    case PolicyKind::PERFECT_MATCHING: out = "pm"; break;
    case PolicyKind::Q_SSG: out = "q_ssg"; break;
    case PolicyKind::Q_MWS: out = "q_mws"; break;
  }
  if (ps.analysis_variant) out += " analysis";
  return out;
}

}  // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& raw) {
  std::string line = trim(raw);
  if (line.empty() || line[0] == '#') return;
  auto eq = line.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("config: expected key = value, got: " + line);
  const std::string key = trim(line.substr(0, eq));
  const std::string val = trim(line.substr(eq + 1));

  if (key == "name") cfg.name = val;
  else if (key == "policy") cfg.policies.push_back(parse_policy_spec(val));
  else if (key == "n") cfg.n_values = parse_list<int>(val, to_int);
  else if (key == "arrival") cfg.arrival = parse_arrival_model(val);
  else if (key == "channel") cfg.channel = parse_channel_model(val);
  else if (key == "horizon") cfg.horizon = to_i64(val);
  else if (key == "warmup") cfg.warmup = to_i64(val);
  else if (key == "thresholds") cfg.thresholds = parse_list<std::int64_t>(val, to_i64);
  else if (key == "seed") cfg.seed_base = to_u64(val);
  else if (key == "replications") cfg.replications = to_int(val);
  else if (key == "seeds") cfg.seeds = parse_list<std::uint64_t>(val, to_u64);
  else if (key == "coupled") cfg.coupled = to_bool(val);
  else if (key == "output_dir") cfg.output_dir = val;
  else if (key == "backlog_stride") cfg.backlog_stride = to_i64(val);
  else if (key == "threads") cfg.threads = to_int(val);
  else throw std::invalid_argument("config: unknown key: " + key);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) apply_config_line(cfg, line);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::uint64_t> ExperimentConfig::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int r = 0; r < replications; ++r) out.push_back(seed_base + r);
  return out;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (policies.empty()) bad.push_back("at least one policy required");
  if (n_values.empty()) bad.push_back("n list must be nonempty");
  for (int n : n_values)
    if (n < 1) bad.push_back("n values must be >= 1");
  if (horizon < 0) bad.push_back("horizon must be >= 0");
  if (warmup < 0) bad.push_back("warmup must be >= 0");
  if (horizon > 0 && horizon <= warmup) bad.push_back("horizon must exceed warmup");
  if (backlog_stride < 1) bad.push_back("backlog_stride must be >= 1");
  if (threads < 1) bad.push_back("threads must be >= 1");
  if (effective_seeds().empty()) bad.push_back("at least one seed required");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    bad.push_back("thresholds must be ascending");
  for (auto b : thresholds)
    if (b < 0) bad.push_back("thresholds must be >= 0");
  if (arrival.kind == ArrivalModel::Kind::Counterexample &&
      !(n_values.size() == 1 && n_values[0] == 2))
    bad.push_back("counterexample arrivals require n = 2 only");
  for (int n : n_values) {
    try {
      arrival.validate(n);
    } catch (const std::exception& e) {
      bad.push_back(e.what());
      break;
    }
  }
  try {
    channel.validate();
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  const int L = arrival.arrival_bound();
  for (const auto& ps : policies) {
    for (int n : n_values) {
      try {
        ps.validate(SystemParams{n, L});
      } catch (const std::exception& e) {
        bad.push_back(std::string(e.what()) + " (policy " + ps.name() + ", n=" +
                      std::to_string(n) + ")");
      }
    }
  }
  return bad;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "name = " << name << '\n';
  for (const auto& ps : policies) out << "policy = " << spec_string(ps) << '\n';
  out << "n = ";
  for (std::size_t i = 0; i < n_values.size(); ++i)
    out << (i ? "," : "") << n_values[i];
  out << '\n';
  out << "arrival = " << arrival.describe() << '\n';
  out << "channel = " << channel.describe() << '\n';
  out << "horizon = " << horizon << '\n';
  out << "warmup = " << warmup << '\n';
  out << "thresholds = ";
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    out << (i ? "," : "") << thresholds[i];
  out << '\n';
  out << "seeds = ";
  auto es = effective_seeds();
  for (std::size_t i = 0; i < es.size(); ++i) out << (i ? "," : "") << es[i];
  out << '\n';
  out << "coupled = " << (coupled ? "true" : "false") << '\n';
  out << "backlog_stride = " << backlog_stride << '\n';
  return out.str();
}

}  // namespace mcsched
