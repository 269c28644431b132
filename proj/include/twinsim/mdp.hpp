#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "twinsim/cost.hpp"
#include "twinsim/scenario.hpp"

namespace twinsim {

enum class MdpAction : std::uint8_t { idle = 0, twin = 1 };

// Decision state of the joint process: PS states, DT states and latch bits.
// The latch width depends on the cost kind the model was built for: one
// any-system bit for c1, one bit per system for c2, none for c3 (its cost is
// memoryless in the latches).
struct MdpStateTuple {
  std::vector<int> s;
  std::vector<int> s_hat;
  std::vector<std::uint8_t> latch;
};

// Uniformized average-cost model of the joint process at delta = 0. At each
// tick (rate Lambda_u = sum_i max_j r_ij) system i jumps j->k with
// probability q_i[j][k]/Lambda_u, else the tick self-loops; a real jump
// updates S and sets the latch. The twin action resets S_hat <- S and clears
// all latches before the cost is evaluated; with delta = 0 the reset is
// instantaneous.
struct MdpModel {
  std::vector<int> radices;        // per-system state counts
  int latch_bits = 0;
  CostFunctionSpec cost;
  std::vector<StateLabels> labels;
  double uniformization_rate = 0.0;

  int num_states = 0;
  std::vector<std::uint64_t> packed;               // dense index -> packed code
  std::unordered_map<std::uint64_t, int> index;    // packed code -> dense index

  // Arcs of (state, action) pairs, laid out at arc_offset[s*2 + a].
  std::vector<std::uint32_t> arc_offset;
  std::vector<std::int32_t> arc_next;
  std::vector<double> arc_prob;
  std::vector<double> cost_rate;   // per (s, a): cost after the action, cost/time
  std::vector<std::int32_t> twin_target;  // per s: dense state after a twin reset

  std::uint64_t pack(const MdpStateTuple& t) const;
  MdpStateTuple unpack(std::uint64_t code) const;
  // Dense index of a tuple, or -1 when the tuple was never enumerated.
  int state_of(const MdpStateTuple& t) const;
};

struct BisectionProbe {
  double eta;
  double rate;
};

// Lagrangian average-cost solution. `gain` is the average of the objective
// the solve optimized (cost plus eta per query, per unit time); `cost_rate`
// and `achieved_rate` split it into the pure cost term and the query rate of
// the returned policy.
struct MdpSolution {
  double eta = 0.0;
  double gain = 0.0;
  double cost_rate = 0.0;
  double achieved_rate = 0.0;
  std::vector<double> bias;
  std::vector<MdpAction> policy;
  std::vector<BisectionProbe> probes;  // filled by solve_constrained
  std::shared_ptr<const MdpModel> model;
};

// Enumerates the states reachable from synchronized starts (BFS under both
// actions) and assembles the uniformized transition and cost arrays.
// Requires scenario.delta == 0. Throws StateSpaceTooLarge past `state_cap`.
std::shared_ptr<const MdpModel> build_mdp(const ScenarioSpec& scenario,
                                          const CostFunctionSpec& cost,
                                          std::size_t state_cap = 1'000'000);

// Relative value iteration for the eta-penalized average-cost problem.
// Terminates when the span of successive value differences drops below
// epsilon (per-tick cost units); ties between actions resolve to idle.
MdpSolution relative_value_iteration(const std::shared_ptr<const MdpModel>& model, double eta,
                                     double epsilon = 1e-9,
                                     std::uint64_t max_iterations = 1'000'000);

// Stationary distribution of the chain induced by `policy` (power iteration
// to 1e-12, damped when plain iteration fails to settle).
std::vector<double> induced_stationary(const MdpModel& model, std::span<const MdpAction> policy);

// Lambda_u * sum_s mu(s) * 1(policy(s) = twin).
double induced_rate(const MdpModel& model, std::span<const MdpAction> policy);

// Bisection on eta for the smallest multiplier whose greedy policy satisfies
// induced_rate <= Lambda. Returns that deterministic policy; achieved_rate
// may fall below Lambda (the gap is visible in the solution). `gain` of the
// result is the pure cost rate of the returned policy.
MdpSolution solve_constrained(const std::shared_ptr<const MdpModel>& model, double Lambda,
                              double epsilon = 1e-9);

// Tabulated action for a decision state. Throws UnknownState for tuples
// outside the model's enumerated space.
MdpAction lookup_decide(const MdpSolution& solution, const MdpStateTuple& state);

// One line per state: state_encoding<TAB>action<TAB>bias, preceded by a
// header with eta, gain, cost_rate, achieved_rate.
void export_solution(const MdpSolution& solution, std::ostream& out);

}  // namespace twinsim
