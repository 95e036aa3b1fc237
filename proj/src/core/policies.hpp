#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "system_state.hpp"

namespace mcsched {

enum class PolicyKind {
  DWM,
  DWM_N,
  D_MWS,
  HYBRID_DWMN_MWS,
  FBS,
  PERFECT_MATCHING,
  Q_SSG,
  Q_MWS,
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::DWM_N;
  int fbs_h = 2;                  // FBS frame span parameter
  bool analysis_variant = false;  // tie-break versions of FBS / perfect matching

  std::string name() const;
  void validate(const SystemParams& p) const;  // e.g. n - L*h >= 1 for FBS
};

PolicySpec parse_policy_spec(const std::string& text);

// ---- per-slot decision functions -----------------------------------------

// Edge-weighted matching over the n oldest packets of each queue (weights are
// the exact packet weight keys).
Schedule dwm_schedule(const SystemState& s, const ConnectivityMatrix& c);

// Vertex-weighted matching over the n globally oldest packets. Unmatched
// servers stay idle.
Schedule dwmn_schedule(const SystemState& s, const ConnectivityMatrix& c);

// Per-server greedy on the largest HOL delay, smallest index on ties. A queue
// receiving m servers serves its m HOL packets (capped by its length).
Schedule dmws_schedule(const SystemState& s, const ConnectivityMatrix& c);

// Stage 1: dwmn_schedule. Stage 2: D-MWS over the leftover servers and the
// residual state with the stage-1 packets removed. Stage 1 is never revised.
Schedule hybrid_dwmn_mws_schedule(const SystemState& s, const ConnectivityMatrix& c);

// Perfect-matching policy: serve HOL packets through a queue-server perfect
// matching when one exists, otherwise idle everything. The analysis variant
// additionally serves only packets in the maximal queue-blind age class.
Schedule perfect_matching_schedule(const SystemState& s, const ConnectivityMatrix& c,
                                   bool analysis_variant);

// Queue-length-based baselines.
Schedule qssg_schedule(const SystemState& s, const ConnectivityMatrix& c);
Schedule qmws_schedule(const SystemState& s, const ConnectivityMatrix& c);

// ---- FBS ------------------------------------------------------------------

struct Frame {
  std::vector<Packet> packets;  // descending weight
  std::int64_t min_slot = 0;
  std::int64_t max_slot = 0;
};

class FrameState {
 public:
  FrameState(const SystemParams& p, int h);

  int capacity() const { return capacity_; }  // n0 = n - L*h
  int span() const { return h_; }
  const std::deque<Frame>& frames() const { return frames_; }

  // new_packets must be sorted by descending weight
  void admit(const std::vector<Packet>& new_packets);
  void pop_hol_frame();

 private:
  int capacity_;
  int h_;
  std::deque<Frame> frames_;
};

// All-or-nothing service of the HOL frame: serve exactly the HOL frame if a
// matching saturating all of its packets exists, otherwise serve nothing.
// Returns the schedule and whether the frame was servable.
std::pair<Schedule, bool> fbs_schedule(const SystemState& s, const FrameState& fs,
                                       const ConnectivityMatrix& c);

// ---- sufficient-condition oracles ----------------------------------------

// Largest k such that the k globally oldest packets are simultaneously
// servable under c.
int max_servable_oldest_prefix(const SystemState& s, const ConnectivityMatrix& c);

// True iff sched serves (at least) the k* oldest packets, where k* is the
// largest feasible oldest-prefix. Serving extra packets is allowed.
bool opf_condition_check(const SystemState& s, const ConnectivityMatrix& c,
                         const Schedule& sched);

// Fluid-limit weight condition with parameter M: every allocated server's
// queue must have HOL delay >= Z_{r,M}(t) for each connected max-HOL-delay
// queue r with Q_r(t) >= M; a server left idle fails if some connected queue
// still holds a packet that sched does not serve.
bool mwf_condition_check(const SystemState& s, const ConnectivityMatrix& c,
                         const Schedule& sched, int M);

// ---- stateful wrapper -----------------------------------------------------

class Policy {
 public:
  virtual ~Policy() = default;
  virtual const std::string& name() const = 0;
  virtual void observe_arrivals(const SystemState& s, const std::vector<Packet>& fresh) {
    (void)s;
    (void)fresh;
  }
  virtual Schedule decide(const SystemState& s, const ConnectivityMatrix& c) = 0;
  virtual void observe_service(const SystemState& s, const std::vector<Packet>& served) {
    (void)s;
    (void)served;
  }
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const SystemParams& params);

}  // namespace mcsched
