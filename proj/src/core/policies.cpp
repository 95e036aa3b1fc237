#include "policies.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "matching.hpp"

namespace mcsched {

namespace {

// Per-server greedy: each server independently picks the connected nonempty
// queue with the largest score (smallest index on ties), then every queue
// serves one HOL packet per allocated server, capped by its length.
Schedule per_server_greedy(const SystemState& s, const ConnectivityMatrix& c,
                           const std::vector<std::int64_t>& score,
                           const std::vector<int>& length) {
  const int n = s.params().n;
  Schedule sched(n);
  std::vector<std::vector<int>> servers_of(n);
  for (int j = 0; j < n; ++j) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (!c.on(i, j) || length[i] == 0) continue;
      if (pick < 0 || score[i] > score[pick]) pick = i;
    }
    if (pick >= 0) {
      sched.allocate(j, pick);
      servers_of[pick].push_back(j);
    }
  }
  for (int i = 0; i < n; ++i) {
    const int m = std::min<int>(static_cast<int>(servers_of[i].size()), length[i]);
    for (int k = 0; k < m; ++k)
      sched.assign(servers_of[i][k], i, s.queue(i)[static_cast<std::size_t>(k)].seq);
  }
  return sched;
}

Schedule schedule_from_matching(const SystemState& s, const Matching& m,
                                const std::vector<Packet>& lefts) {
  Schedule sched(s.params().n);
  for (std::size_t l = 0; l < lefts.size(); ++l) {
    int server = m.left_to_right[static_cast<int>(l)];
    if (server >= 0) sched.assign(server, lefts[l].queue, lefts[l].seq);
  }
  return sched;
}

BipartiteGraph packet_server_graph(const SystemState& s, const ConnectivityMatrix& c,
                                   const std::vector<Packet>& lefts) {
  BipartiteGraph g(static_cast<int>(lefts.size()), s.params().n);
  for (std::size_t l = 0; l < lefts.size(); ++l)
    for (int j = 0; j < s.params().n; ++j)
      if (c.on(lefts[l].queue, j)) g.add_edge(static_cast<int>(l), j);
  return g;
}

}  // namespace

Schedule dwm_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  std::vector<Packet> lefts;
  for (int i = 0; i < n; ++i) {
    const auto& q = s.queue(i);
    const int take = std::min<int>(n, static_cast<int>(q.size()));
    for (int l = 0; l < take; ++l) lefts.push_back(q[static_cast<std::size_t>(l)]);
  }
  BipartiteGraph g(static_cast<int>(lefts.size()), n);
  for (std::size_t l = 0; l < lefts.size(); ++l) {
    std::int64_t w = s.weight_key(lefts[l]);
    for (int j = 0; j < n; ++j)
      if (c.on(lefts[l].queue, j)) g.add_edge(static_cast<int>(l), j, w);
  }
  return schedule_from_matching(s, max_edge_weight_matching(g), lefts);
}

Schedule dwmn_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  std::vector<Packet> lefts = s.oldest_packets(static_cast<std::size_t>(n));
  BipartiteGraph g = packet_server_graph(s, c, lefts);
  g.left_weights.resize(lefts.size());
  for (std::size_t l = 0; l < lefts.size(); ++l)
    g.left_weights[l] = s.weight_key(lefts[l]);
  return schedule_from_matching(s, max_vertex_weight_matching(g), lefts);
}

Schedule dmws_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  std::vector<std::int64_t> score(n);
  std::vector<int> length(n);
  for (int i = 0; i < n; ++i) {
    score[i] = s.hol_delay(i);
    length[i] = s.queue_length(i);
  }
  return per_server_greedy(s, c, score, length);
}

Schedule hybrid_dwmn_mws_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  Schedule stage1 = dwmn_schedule(s, c);

  // residual state: stage-1 packets removed
  std::vector<std::vector<char>> taken(n);
  for (int i = 0; i < n; ++i) taken[i].assign(s.queue(i).size(), 0);
  for (const auto& a : stage1.assignments()) {
    const auto& q = s.queue(a.queue);
    for (std::size_t l = 0; l < q.size(); ++l)
      if (q[l].seq == a.seq) taken[a.queue][l] = 1;
  }
  std::vector<std::vector<const Packet*>> residual(n);
  std::vector<std::int64_t> score(n, 0);
  std::vector<int> length(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto& q = s.queue(i);
    for (std::size_t l = 0; l < q.size(); ++l)
      if (!taken[i][l]) residual[i].push_back(&q[l]);
    length[i] = static_cast<int>(residual[i].size());
    score[i] = length[i] ? s.slot() - residual[i].front()->arrival_slot : 0;
  }

  Schedule out = stage1;
  std::vector<std::vector<int>> servers_of(n);
  for (int j = 0; j < n; ++j) {
    if (stage1.server_allocated(j)) continue;
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (!c.on(i, j) || length[i] == 0) continue;
      if (pick < 0 || score[i] > score[pick]) pick = i;
    }
    if (pick >= 0) {
      out.allocate(j, pick);
      servers_of[pick].push_back(j);
    }
  }
  for (int i = 0; i < n; ++i) {
    const int m = std::min<int>(static_cast<int>(servers_of[i].size()), length[i]);
    for (int k = 0; k < m; ++k)
      out.assign(servers_of[i][k], i, residual[i][static_cast<std::size_t>(k)]->seq);
  }
  return out;
}

Schedule perfect_matching_schedule(const SystemState& s, const ConnectivityMatrix& c,
                                   bool analysis_variant) {
  const int n = s.params().n;
  Schedule sched(n);
  BipartiteGraph g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.on(i, j)) g.add_edge(i, j);
  Matching m = max_cardinality_matching(g);
  if (m.cardinality() < n) return sched;  // no perfect matching: everyone idles

  std::int64_t max_class = 0;
  bool any = false;
  if (analysis_variant) {
    for (int i = 0; i < n; ++i) {
      if (s.queue_length(i) == 0) continue;
      std::int64_t k = packet_class_key(s.queue(i).front(), s.slot(), s.params());
      if (!any || k > max_class) max_class = k;
      any = true;
    }
  }
  for (int i = 0; i < n; ++i) {
    int j = m.left_to_right[i];
    sched.allocate(j, i);
    if (s.queue_length(i) == 0) continue;
    const Packet& hol = s.queue(i).front();
    if (analysis_variant &&
        packet_class_key(hol, s.slot(), s.params()) != max_class)
      continue;  // the matched server idles
    sched.assign(j, i, hol.seq);
  }
  return sched;
}

Schedule qssg_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  Schedule sched(n);
  std::vector<int> residual(n);
  for (int i = 0; i < n; ++i) residual[i] = s.queue_length(i);
  std::vector<std::vector<int>> servers_of(n);
  for (int j = 0; j < n; ++j) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (!c.on(i, j) || residual[i] == 0) continue;
      if (pick < 0 || residual[i] > residual[pick]) pick = i;
    }
    if (pick >= 0) {
      sched.allocate(j, pick);
      servers_of[pick].push_back(j);
      --residual[pick];
    }
  }
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < servers_of[i].size(); ++k)
      sched.assign(servers_of[i][k], i, s.queue(i)[k].seq);
  return sched;
}

Schedule qmws_schedule(const SystemState& s, const ConnectivityMatrix& c) {
  const int n = s.params().n;
  std::vector<std::int64_t> score(n);
  std::vector<int> length(n);
  for (int i = 0; i < n; ++i) {
    length[i] = s.queue_length(i);
    score[i] = length[i];
  }
  return per_server_greedy(s, c, score, length);
}

// ---- FBS ------------------------------------------------------------------

FrameState::FrameState(const SystemParams& p, int h)
    : capacity_(p.n - p.L * h), h_(h) {
  if (h < 1) throw std::invalid_argument("FBS: h must be positive");
  if (capacity_ < 1) throw std::invalid_argument("FBS: n - L*h must be >= 1");
}

void FrameState::admit(const std::vector<Packet>& new_packets) {
  for (const Packet& p : new_packets) {
    bool fits = false;
    if (!frames_.empty()) {
      Frame& last = frames_.back();
      fits = static_cast<int>(last.packets.size()) < capacity_ &&
             p.arrival_slot - last.min_slot <= h_;
    }
    if (fits) {
      Frame& last = frames_.back();
      last.packets.push_back(p);
      last.max_slot = std::max(last.max_slot, p.arrival_slot);
    } else {
      frames_.push_back(Frame{{p}, p.arrival_slot, p.arrival_slot});
    }
  }
}

void FrameState::pop_hol_frame() {
  if (frames_.empty()) throw std::logic_error("FBS: no frame to pop");
  frames_.pop_front();
}

std::pair<Schedule, bool> fbs_schedule(const SystemState& s, const FrameState& fs,
                                       const ConnectivityMatrix& c) {
  Schedule sched(s.params().n);
  if (fs.frames().empty()) return {sched, false};
  const std::vector<Packet>& hol = fs.frames().front().packets;
  BipartiteGraph g = packet_server_graph(s, c, hol);
  Matching m = max_cardinality_matching(g);
  if (m.cardinality() < static_cast<int>(hol.size())) return {sched, false};
  return {schedule_from_matching(s, m, hol), true};
}

// ---- sufficient-condition oracles ----------------------------------------

int max_servable_oldest_prefix(const SystemState& s, const ConnectivityMatrix& c) {
  std::vector<Packet> lefts =
      s.oldest_packets(static_cast<std::size_t>(s.params().n));
  return max_saturable_prefix(packet_server_graph(s, c, lefts));
}

bool opf_condition_check(const SystemState& s, const ConnectivityMatrix& c,
                         const Schedule& sched) {
  std::vector<Packet> lefts =
      s.oldest_packets(static_cast<std::size_t>(s.params().n));
  int k = max_saturable_prefix(packet_server_graph(s, c, lefts));
  for (int l = 0; l < k; ++l) {
    bool found = false;
    for (const auto& a : sched.assignments()) found |= (a.seq == lefts[l].seq);
    if (!found) return false;
  }
  return true;
}

bool mwf_condition_check(const SystemState& s, const ConnectivityMatrix& c,
                         const Schedule& sched, int M) {
  const int n = s.params().n;
  if (M < 1) throw std::invalid_argument("mwf_condition_check: M must be positive");
  std::vector<int> served_count(n, 0);
  for (const auto& a : sched.assignments()) ++served_count[a.queue];

  for (int j = 0; j < n; ++j) {
    const int alloc = sched.queue_of(j);
    if (alloc < 0) {
      // an idle server must have no connected packet left unserved
      for (int i = 0; i < n; ++i)
        if (c.on(i, j) && s.queue_length(i) > served_count[i]) return false;
      continue;
    }
    std::int64_t max_w = -1;
    for (int i = 0; i < n; ++i)
      if (c.on(i, j)) max_w = std::max(max_w, s.hol_delay(i));
    const std::int64_t w_alloc = s.hol_delay(alloc);
    for (int r = 0; r < n; ++r) {
      if (!c.on(r, j) || s.hol_delay(r) != max_w) continue;
      if (s.queue_length(r) < M) continue;
      if (w_alloc < s.packet_delay(r, M)) return false;
    }
  }
  return true;
}

// ---- specs and stateful wrappers ------------------------------------------

std::string PolicySpec::name() const {
  std::string base;
  switch (kind) {
    case PolicyKind::DWM: base = "dwm"; break;
    case PolicyKind::DWM_N: base = "dwm_n"; break;
    case PolicyKind::D_MWS: base = "d_mws"; break;
    case PolicyKind::HYBRID_DWMN_MWS: base = "hybrid"; break;
    case PolicyKind::FBS: base = "fbs_h" + std::to_string(fbs_h); break;
    case PolicyKind::PERFECT_MATCHING: base = "pm"; break;
    case PolicyKind::Q_SSG: base = "q_ssg"; break;
    case PolicyKind::Q_MWS: base = "q_mws"; break;
  }
  if (analysis_variant) base += "_a";
  return base;
}

void PolicySpec::validate(const SystemParams& p) const {
  if (kind == PolicyKind::FBS) {
    if (fbs_h < 1) throw std::invalid_argument("fbs: h must be positive");
    if (p.n - p.L * fbs_h < 1)
      throw std::invalid_argument("fbs: requires n - L*h >= 1");
  }
}

PolicySpec parse_policy_spec(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  if (!(in >> tok)) throw std::invalid_argument("empty policy spec");
  PolicySpec spec;
  if (tok == "dwm") spec.kind = PolicyKind::DWM;
  else if (tok == "dwm_n" || tok == "dwm-n" || tok == "dwmn") spec.kind = PolicyKind::DWM_N;
  else if (tok == "d_mws" || tok == "d-mws" || tok == "dmws") spec.kind = PolicyKind::D_MWS;
  else if (tok == "hybrid" || tok == "dwm_n_mws" || tok == "dwm-n-mws")
    spec.kind = PolicyKind::HYBRID_DWMN_MWS;
  else if (tok == "fbs") spec.kind = PolicyKind::FBS;
  else if (tok == "pm" || tok == "perfect_matching")
    spec.kind = PolicyKind::PERFECT_MATCHING;
  else if (tok == "q_ssg" || tok == "q-ssg" || tok == "qssg") spec.kind = PolicyKind::Q_SSG;
  else if (tok == "q_mws" || tok == "q-mws" || tok == "qmws") spec.kind = PolicyKind::Q_MWS;
  else throw std::invalid_argument("unknown policy: " + tok);
  while (in >> tok) {
    if (tok == "analysis") spec.analysis_variant = true;
    else if (tok.rfind("h=", 0) == 0) spec.fbs_h = std::stoi(tok.substr(2));
    else throw std::invalid_argument("unknown policy option: " + tok);
  }
  return spec;
}

namespace {

class StatelessPolicy final : public Policy {
 public:
  using Fn = std::function<Schedule(const SystemState&, const ConnectivityMatrix&)>;
  StatelessPolicy(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  const std::string& name() const override { return name_; }
  Schedule decide(const SystemState& s, const ConnectivityMatrix& c) override {
    return fn_(s, c);
  }

 private:
  std::string name_;
  Fn fn_;
};

class FbsPolicy final : public Policy {
 public:
  FbsPolicy(std::string name, const SystemParams& p, int h)
      : name_(std::move(name)), frames_(p, h) {}
  const std::string& name() const override { return name_; }

  void observe_arrivals(const SystemState&, const std::vector<Packet>& fresh) override {
    frames_.admit(fresh);
  }
  Schedule decide(const SystemState& s, const ConnectivityMatrix& c) override {
    auto [sched, servable] = fbs_schedule(s, frames_, c);
    served_frame_ = servable;
    return sched;
  }
  void observe_service(const SystemState&, const std::vector<Packet>&) override {
    if (served_frame_) frames_.pop_hol_frame();
    served_frame_ = false;
  }

  const FrameState& frames() const { return frames_; }

 private:
  std::string name_;
  FrameState frames_;
  bool served_frame_ = false;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const SystemParams& params) {
  spec.validate(params);
  const std::string name = spec.name();
  switch (spec.kind) {
    case PolicyKind::DWM:
      return std::make_unique<StatelessPolicy>(name, dwm_schedule);
    case PolicyKind::DWM_N:
      return std::make_unique<StatelessPolicy>(name, dwmn_schedule);
    case PolicyKind::D_MWS:
      return std::make_unique<StatelessPolicy>(name, dmws_schedule);
    case PolicyKind::HYBRID_DWMN_MWS:
      return std::make_unique<StatelessPolicy>(name, hybrid_dwmn_mws_schedule);
    case PolicyKind::FBS:
      return std::make_unique<FbsPolicy>(name, params, spec.fbs_h);
    case PolicyKind::PERFECT_MATCHING: {
      bool analysis = spec.analysis_variant;
      return std::make_unique<StatelessPolicy>(
          name, [analysis](const SystemState& s, const ConnectivityMatrix& c) {
            return perfect_matching_schedule(s, c, analysis);
          });
    }
    case PolicyKind::Q_SSG:
      return std::make_unique<StatelessPolicy>(name, qssg_schedule);
    case PolicyKind::Q_MWS:
      return std::make_unique<StatelessPolicy>(name, qmws_schedule);
  }
  throw std::logic_error("unreachable policy kind");
}

}  // namespace mcsched
