#include "traffic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcsched {

namespace {

// accepts plain decimals and exact fractions like "17/96"
double parse_real(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

void check_row_stochastic(const TransitionMatrix& t, const char* what) {
  for (int r = 0; r < 2; ++r) {
    double sum = 0;
    for (int c = 0; c < 2; ++c) {
      if (t[r][c] < 0.0 || t[r][c] > 1.0)
        throw std::invalid_argument(std::string(what) + ": entries must be in [0,1]");
      sum += t[r][c];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument(std::string(what) + ": rows must sum to 1");
  }
}

TransitionMatrix parse_matrix(const std::string& csv, const char* what) {
  TransitionMatrix t;
  std::istringstream in(csv);
  std::string cell;
  double vals[4];
  for (int k = 0; k < 4; ++k) {
    if (!std::getline(in, cell, ','))
      throw std::invalid_argument(std::string(what) + ": expected 4 comma-separated values");
    vals[k] = parse_real(cell);
  }
  t[0][0] = vals[0];
  t[0][1] = vals[1];
  t[1][0] = vals[2];
  t[1][1] = vals[3];
  return t;
}

}  // namespace

double stationary_p0(const TransitionMatrix& t) {
  double denom = t[0][1] + t[1][0];
  if (denom <= 0.0) return 1.0;  // absorbing everywhere: stay where started
  return t[1][0] / denom;
}

int ArrivalModel::arrival_bound() const {
  switch (kind) {
    case Kind::Bernoulli: return 1;
    case Kind::MarkovBurst: return batch;
    case Kind::Counterexample: return burst;
  }
  return 1;
}

double ArrivalModel::mean_rate() const {
  switch (kind) {
    case Kind::Bernoulli: return p;
    case Kind::MarkovBurst: return batch * stationary_p0(trans);
    case Kind::Counterexample: return p * burst / 2.0;
  }
  return 0.0;
}

void ArrivalModel::validate(int n) const {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("arrival: p must be in [0,1]");
  switch (kind) {
    case Kind::Bernoulli: break;
    case Kind::MarkovBurst:
      if (batch < 1) throw std::invalid_argument("markov_burst: batch must be >= 1");
      check_row_stochastic(trans, "markov_burst");
      break;
    case Kind::Counterexample:
      if (burst < 1) throw std::invalid_argument("counterexample: K must be >= 1");
      if (n != 2) throw std::invalid_argument("counterexample arrivals require n = 2");
      break;
  }
}

std::string ArrivalModel::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Bernoulli: out << "bernoulli p=" << p; break;
    case Kind::MarkovBurst:
      out << "markov_burst batch=" << batch << " P=" << trans[0][0] << ',' << trans[0][1]
          << ',' << trans[1][0] << ',' << trans[1][1];
      break;
    case Kind::Counterexample: out << "counterexample K=" << burst << " p=" << p; break;
  }
  return out.str();
}

void ChannelModel::validate() const {
  switch (kind) {
    case Kind::IidOnOff:
      if (q <= 0.0 || q >= 1.0)
        throw std::invalid_argument("channel: q must be in (0,1)");
      break;
    case Kind::GilbertElliott:
      check_row_stochastic(near, "gilbert_elliott near");
      check_row_stochastic(far, "gilbert_elliott far");
      break;
  }
}

std::string ChannelModel::describe() const {
  std::ostringstream out;
  if (kind == Kind::IidOnOff) {
    out << "iid q=" << q;
  } else {
    out << "gilbert_elliott near=" << near[0][0] << ',' << near[0][1] << ',' << near[1][0]
        << ',' << near[1][1] << " far=" << far[0][0] << ',' << far[0][1] << ','
        << far[1][0] << ',' << far[1][1];
  }
  return out.str();
}

ArrivalModel parse_arrival_model(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  if (!(in >> tok)) throw std::invalid_argument("empty arrival model");
  ArrivalModel m;
  if (tok == "bernoulli") m.kind = ArrivalModel::Kind::Bernoulli;
  else if (tok == "markov_burst" || tok == "bursty") m.kind = ArrivalModel::Kind::MarkovBurst;
  else if (tok == "counterexample") m.kind = ArrivalModel::Kind::Counterexample;
  else throw std::invalid_argument("unknown arrival model: " + tok);
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("arrival model: expected key=value, got " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "p") m.p = parse_real(val);
    else if (key == "batch") m.batch = std::stoi(val);
    else if (key == "K") m.burst = std::stoi(val);
    else if (key == "P") m.trans = parse_matrix(val, "markov_burst P");
    else throw std::invalid_argument("arrival model: unknown key " + key);
  }
  return m;
}

ChannelModel parse_channel_model(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  if (!(in >> tok)) throw std::invalid_argument("empty channel model");
  ChannelModel m;
  if (tok == "iid") m.kind = ChannelModel::Kind::IidOnOff;
  else if (tok == "gilbert_elliott" || tok == "ge") m.kind = ChannelModel::Kind::GilbertElliott;
  else throw std::invalid_argument("unknown channel model: " + tok);
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("channel model: expected key=value, got " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "q") m.q = parse_real(val);
    else if (key == "near") m.near = parse_matrix(val, "gilbert_elliott near");
    else if (key == "far") m.far = parse_matrix(val, "gilbert_elliott far");
    else throw std::invalid_argument("channel model: unknown key " + key);
  }
  return m;
}

// ---- processes ------------------------------------------------------------

ArrivalProcess::ArrivalProcess(const ArrivalModel& model, int n, std::uint64_t seed,
                               std::uint64_t replication)
    : model_(model), n_(n) {
  model_.validate(n);
  const auto domain = static_cast<std::uint64_t>(StreamDomain::Arrival);
  if (model_.kind == ArrivalModel::Kind::Counterexample) {
    streams_.emplace_back(seed, replication, domain, 0);
    return;
  }
  streams_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) streams_.emplace_back(seed, replication, domain, i);
  if (model_.kind == ArrivalModel::Kind::MarkovBurst) {
    // start from the stationary distribution, one extra draw per user
    chain_state_.resize(static_cast<std::size_t>(n));
    const double p_on = stationary_p0(model_.trans);
    for (int i = 0; i < n; ++i)
      chain_state_[i] = streams_[i].next_double() < p_on ? 0 : 1;
  }
}

std::vector<int> ArrivalProcess::next() {
  std::vector<int> counts(static_cast<std::size_t>(n_), 0);
  switch (model_.kind) {
    case ArrivalModel::Kind::Bernoulli:
      for (int i = 0; i < n_; ++i)
        counts[i] = streams_[i].bernoulli(model_.p) ? 1 : 0;
      break;
    case ArrivalModel::Kind::MarkovBurst:
      for (int i = 0; i < n_; ++i) {
        counts[i] = chain_state_[i] == 0 ? model_.batch : 0;
        // state transitions occur at the end of the slot
        const double u = streams_[i].next_double();
        chain_state_[i] = u < model_.trans[chain_state_[i]][0] ? 0 : 1;
      }
      break;
    case ArrivalModel::Kind::Counterexample:
      // two-slot frames phase-locked to even/odd absolute slot index
      if (slot_ % 2 == 0) frame_active_ = streams_[0].bernoulli(model_.p);
      if (frame_active_) counts[slot_ % 2 == 0 ? 0 : 1] = model_.burst;
      break;
  }
  ++slot_;
  return counts;
}

ChannelProcess::ChannelProcess(const ChannelModel& model, int n, std::uint64_t seed,
                               std::uint64_t replication)
    : model_(model), n_(n) {
  model_.validate();
  const auto domain = static_cast<std::uint64_t>(StreamDomain::Channel);
  streams_.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      streams_.emplace_back(seed, replication, domain,
                            static_cast<std::uint64_t>(i) * n + j);
  if (model_.kind == ChannelModel::Kind::GilbertElliott) {
    chain_state_.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      // 1-based user index: odd = near, even = far
      const TransitionMatrix& t = (i % 2 == 0) ? model_.near : model_.far;
      const double p_on = stationary_p0(t);
      for (int j = 0; j < n; ++j) {
        auto k = static_cast<std::size_t>(i) * n + j;
        chain_state_[k] = streams_[k].next_double() < p_on ? 0 : 1;
      }
    }
  }
}

ConnectivityMatrix ChannelProcess::next() {
  ConnectivityMatrix c(n_);
  if (model_.kind == ChannelModel::Kind::IidOnOff) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        c.set(i, j, streams_[static_cast<std::size_t>(i) * n_ + j].bernoulli(model_.q));
    return c;
  }
  for (int i = 0; i < n_; ++i) {
    const TransitionMatrix& t = (i % 2 == 0) ? model_.near : model_.far;
    for (int j = 0; j < n_; ++j) {
      auto k = static_cast<std::size_t>(i) * n_ + j;
      c.set(i, j, chain_state_[k] == 0);
      const double u = streams_[k].next_double();
      chain_state_[k] = u < t[chain_state_[k]][0] ? 0 : 1;
    }
  }
  return c;
}

void TraceHasher::add_counts(const std::vector<int>& counts) {
  for (int v : counts)
    for (int s = 0; s < 32; s += 8) byte(static_cast<std::uint8_t>(v >> s));
}

void TraceHasher::add_connectivity(const ConnectivityMatrix& c) {
  for (std::uint8_t b : c.raw()) byte(b);
}

}  // namespace mcsched
