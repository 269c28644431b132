#include "twinsim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "twinsim/errors.hpp"
#include "twinsim/format.hpp"

namespace twinsim {

namespace {

// Ties between twin and idle resolve to idle unless twin improves by more
// than this; keeps the policy from issuing queries that change nothing.
constexpr double kTieEpsilon = 1e-12;

// Aperiodicity blend for value iteration: the Bellman backup mixes the
// current value with weight tau, which leaves gain and greedy actions
// unchanged while removing periodic cycling.
constexpr double kAperiodicityTau = 0.5;

int latch_bits_for(const CostFunctionSpec& cost, int num_systems) {
  switch (cost.kind) {
    case CostKind::c1: return 1;          // only "any system moved" matters
    case CostKind::c2: return num_systems;
    case CostKind::c3: return 0;          // memoryless in the latches
  }
  return 0;
}

void apply_twin_in_place(MdpStateTuple& t) {
  t.s_hat = t.s;
  std::fill(t.latch.begin(), t.latch.end(), std::uint8_t{0});
}

void apply_jump_in_place(MdpStateTuple& t, int system, int to, int latch_bits) {
  t.s[static_cast<std::size_t>(system)] = to;
  if (latch_bits == 1 && t.latch.size() == 1) {
    t.latch[0] = 1;
  } else if (latch_bits > 1) {
    t.latch[static_cast<std::size_t>(system)] = 1;
  }
}

double state_cost(const MdpModel& model, const MdpStateTuple& t) {
  switch (model.cost.kind) {
    case CostKind::c1:
      return t.latch.empty() ? 0.0 : (t.latch[0] ? 1.0 : 0.0);
    case CostKind::c2: {
      double total = 0.0;
      for (std::size_t i = 0; i < t.latch.size(); ++i) {
        if (t.latch[i]) total += model.cost.weights[i];
      }
      return total;
    }
    case CostKind::c3: {
      const std::size_t k = t.s.size();
      std::vector<double> x(k), y(k);
      for (std::size_t i = 0; i < k; ++i) {
        x[i] = model.labels[i].values[static_cast<std::size_t>(t.s[i])];
        y[i] = model.labels[i].values[static_cast<std::size_t>(t.s_hat[i])];
      }
      return distance_value(model.cost.distance, x, y, model.cost.weights,
                            model.cost.cosine_zero_convention);
    }
  }
  return 0.0;
}

}  // namespace

std::uint64_t MdpModel::pack(const MdpStateTuple& t) const {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < radices.size(); ++i) {
    code = code * static_cast<std::uint64_t>(radices[i]) + static_cast<std::uint64_t>(t.s[i]);
  }
  for (std::size_t i = 0; i < radices.size(); ++i) {
    code = code * static_cast<std::uint64_t>(radices[i]) + static_cast<std::uint64_t>(t.s_hat[i]);
  }
  for (int b = 0; b < latch_bits; ++b) {
    code = code * 2 + (t.latch[static_cast<std::size_t>(b)] ? 1 : 0);
  }
  return code;
}

MdpStateTuple MdpModel::unpack(std::uint64_t code) const {
  const std::size_t k = radices.size();
  MdpStateTuple t;
  t.s.resize(k);
  t.s_hat.resize(k);
  t.latch.resize(static_cast<std::size_t>(latch_bits));
  for (int b = latch_bits - 1; b >= 0; --b) {
    t.latch[static_cast<std::size_t>(b)] = code & 1;
    code >>= 1;
  }
  for (std::size_t i = k; i-- > 0;) {
    t.s_hat[i] = static_cast<int>(code % static_cast<std::uint64_t>(radices[i]));
    code /= static_cast<std::uint64_t>(radices[i]);
  }
  for (std::size_t i = k; i-- > 0;) {
    t.s[i] = static_cast<int>(code % static_cast<std::uint64_t>(radices[i]));
    code /= static_cast<std::uint64_t>(radices[i]);
  }
  return t;
}

int MdpModel::state_of(const MdpStateTuple& t) const {
  const auto it = index.find(pack(t));
  return it == index.end() ? -1 : it->second;
}

std::shared_ptr<const MdpModel> build_mdp(const ScenarioSpec& scenario,
                                          const CostFunctionSpec& cost,
                                          std::size_t state_cap) {
  if (scenario.delta != 0.0) {
    throw DeltaNotZero("build_mdp requires delta = 0, got delta = " + g12(scenario.delta));
  }
  const int k = scenario.num_systems();
  if (cost.kind == CostKind::c2 && static_cast<int>(cost.weights.size()) != k) {
    throw WeightLengthMismatch("build_mdp: c2 weight count does not match system count");
  }

  auto model = std::make_shared<MdpModel>();
  model->cost = cost;
  model->latch_bits = latch_bits_for(cost, k);
  for (const auto& sys : scenario.systems) {
    model->radices.push_back(sys.gen.size());
    model->labels.push_back(sys.labels);
    model->uniformization_rate += sys.gen.max_exit_rate();
  }

  // Capacity check: the packed code must fit 64 bits.
  long double capacity = std::pow(2.0L, model->latch_bits);
  for (int r : model->radices) capacity *= static_cast<long double>(r) * r;
  if (capacity > std::pow(2.0L, 63)) {
    throw StateSpaceTooLarge("build_mdp: raw product space exceeds packing capacity");
  }

  // BFS over both actions' kernels from every synchronized start.
  std::deque<int> frontier;
  auto intern = [&](const MdpStateTuple& t) {
    const std::uint64_t code = model->pack(t);
    auto [it, inserted] = model->index.try_emplace(code, model->num_states);
    if (inserted) {
      if (static_cast<std::size_t>(model->num_states) >= state_cap) {
        throw StateSpaceTooLarge("build_mdp: state cap of " + std::to_string(state_cap) +
                                 " exceeded");
      }
      model->packed.push_back(code);
      ++model->num_states;
      frontier.push_back(it->second);
    }
    return it->second;
  };

  {
    MdpStateTuple t;
    t.s.assign(static_cast<std::size_t>(k), 0);
    t.latch.assign(static_cast<std::size_t>(model->latch_bits), 0);
    bool done = false;
    while (!done) {
      t.s_hat = t.s;
      intern(t);
      done = true;
      for (int i = 0; i < k; ++i) {
        if (++t.s[static_cast<std::size_t>(i)] < model->radices[static_cast<std::size_t>(i)]) {
          done = false;
          break;
        }
        t.s[static_cast<std::size_t>(i)] = 0;
      }
    }
  }

  const double lambda_u = model->uniformization_rate;
  model->arc_offset.push_back(0);
  while (!frontier.empty()) {
    const int dense = frontier.front();
    frontier.pop_front();
    const MdpStateTuple base = model->unpack(model->packed[static_cast<std::size_t>(dense)]);

    for (int action = 0; action < 2; ++action) {
      MdpStateTuple origin = base;
      if (action == static_cast<int>(MdpAction::twin)) {
        apply_twin_in_place(origin);
      }
      model->cost_rate.push_back(state_cost(*model, origin));

      double jump_mass = 0.0;
      for (int i = 0; i < k; ++i) {
        const auto& gen = scenario.systems[static_cast<std::size_t>(i)].gen;
        const int from = origin.s[static_cast<std::size_t>(i)];
        for (int to = 0; to < gen.size(); ++to) {
          if (to == from) continue;
          const double rate = gen.entry(from, to);
          if (rate <= 0.0) continue;
          MdpStateTuple next = origin;
          apply_jump_in_place(next, i, to, model->latch_bits);
          model->arc_next.push_back(intern(next));
          model->arc_prob.push_back(rate / lambda_u);
          jump_mass += rate / lambda_u;
        }
      }
      const double self_prob = 1.0 - jump_mass;
      if (self_prob > 1e-15) {
        model->arc_next.push_back(intern(origin));
        model->arc_prob.push_back(self_prob);
      }
      model->arc_offset.push_back(static_cast<std::uint32_t>(model->arc_next.size()));

      if (action == static_cast<int>(MdpAction::twin)) {
        if (model->twin_target.size() <= static_cast<std::size_t>(dense)) {
          model->twin_target.resize(static_cast<std::size_t>(dense) + 1, -1);
        }
        model->twin_target[static_cast<std::size_t>(dense)] = intern(origin);
      }
    }
  }
  model->twin_target.resize(static_cast<std::size_t>(model->num_states), -1);
  return model;
}

namespace {

// Bellman backup with the aperiodicity blend. Returns the chosen action's
// blended value; `action_out` gets the greedy action under idle tie-break.
inline double backup(const MdpModel& m, const std::vector<double>& v, int s, double eta,
                     double inv_lambda, MdpAction* action_out) {
  double vals[2];
  for (int a = 0; a < 2; ++a) {
    const std::size_t slot = static_cast<std::size_t>(s) * 2 + static_cast<std::size_t>(a);
    double acc = m.cost_rate[slot] * inv_lambda + (a == 1 ? eta : 0.0);
    double future = 0.0;
    for (std::uint32_t arc = m.arc_offset[slot]; arc < m.arc_offset[slot + 1]; ++arc) {
      future += m.arc_prob[arc] * v[static_cast<std::size_t>(m.arc_next[arc])];
    }
    acc += kAperiodicityTau * v[static_cast<std::size_t>(s)] +
           (1.0 - kAperiodicityTau) * future;
    vals[a] = acc;
  }
  const bool twin = vals[1] < vals[0] - kTieEpsilon;
  if (action_out) *action_out = twin ? MdpAction::twin : MdpAction::idle;
  return twin ? vals[1] : vals[0];
}

}  // namespace

MdpSolution relative_value_iteration(const std::shared_ptr<const MdpModel>& model, double eta,
                                     double epsilon, std::uint64_t max_iterations) {
  if (eta < 0.0) throw Error("relative_value_iteration: eta must be >= 0");
  if (epsilon <= 0.0) throw Error("relative_value_iteration: epsilon must be > 0");
  const MdpModel& m = *model;
  const int n = m.num_states;
  const double inv_lambda = 1.0 / m.uniformization_rate;

  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  std::vector<double> tv(static_cast<std::size_t>(n), 0.0);
  double gain_tick = 0.0;
  bool converged = false;
  for (std::uint64_t iter = 0; iter < max_iterations; ++iter) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < n; ++s) {
      tv[static_cast<std::size_t>(s)] = backup(m, v, s, eta, inv_lambda, nullptr);
      const double diff = tv[static_cast<std::size_t>(s)] - v[static_cast<std::size_t>(s)];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    gain_tick = 0.5 * (lo + hi);
    const double anchor = tv[0];
    for (double& x : tv) x -= anchor;
    v.swap(tv);
    if (hi - lo < epsilon) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoConvergence("relative value iteration did not converge (eta = " + g12(eta) + ")");
  }

  MdpSolution sol;
  sol.eta = eta;
  sol.model = model;
  sol.policy.resize(static_cast<std::size_t>(n));
  sol.bias.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    MdpAction a;
    backup(m, v, s, eta, inv_lambda, &a);
    sol.policy[static_cast<std::size_t>(s)] = a;
    sol.bias[static_cast<std::size_t>(s)] = (1.0 - kAperiodicityTau) * v[static_cast<std::size_t>(s)];
  }
  sol.gain = gain_tick * m.uniformization_rate;

  const auto mu = induced_stationary(m, sol.policy);
  double cost = 0.0, twin_mass = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto a = static_cast<std::size_t>(sol.policy[static_cast<std::size_t>(s)]);
    cost += mu[static_cast<std::size_t>(s)] * m.cost_rate[static_cast<std::size_t>(s) * 2 + a];
    if (sol.policy[static_cast<std::size_t>(s)] == MdpAction::twin) {
      twin_mass += mu[static_cast<std::size_t>(s)];
    }
  }
  sol.cost_rate = cost;
  sol.achieved_rate = m.uniformization_rate * twin_mass;
  return sol;
}

std::vector<double> induced_stationary(const MdpModel& m, std::span<const MdpAction> policy) {
  if (static_cast<int>(policy.size()) != m.num_states) {
    throw Error("induced_stationary: policy size does not match model");
  }
  const int n = m.num_states;
  std::vector<double> mu(static_cast<std::size_t>(n), 1.0 / n);
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);

  constexpr std::uint64_t kDampAfter = 20'000;
  constexpr std::uint64_t kMaxIterations = 2'000'000;
  for (std::uint64_t iter = 0; iter < kMaxIterations; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      const double mass = mu[static_cast<std::size_t>(s)];
      if (mass == 0.0) continue;
      const std::size_t slot = static_cast<std::size_t>(s) * 2 +
                               static_cast<std::size_t>(policy[static_cast<std::size_t>(s)]);
      for (std::uint32_t arc = m.arc_offset[slot]; arc < m.arc_offset[slot + 1]; ++arc) {
        next[static_cast<std::size_t>(m.arc_next[arc])] += mass * m.arc_prob[arc];
      }
    }
    if (iter >= kDampAfter) {
      for (int s = 0; s < n; ++s) {
        next[static_cast<std::size_t>(s)] =
            0.5 * next[static_cast<std::size_t>(s)] + 0.5 * mu[static_cast<std::size_t>(s)];
      }
    }
    double l1 = 0.0;
    for (int s = 0; s < n; ++s) {
      l1 += std::fabs(next[static_cast<std::size_t>(s)] - mu[static_cast<std::size_t>(s)]);
    }
    mu.swap(next);
    if (l1 < 1e-12) return mu;
  }
  throw PeriodicOrReducibleChain("induced_stationary: power iteration did not settle");
}

double induced_rate(const MdpModel& m, std::span<const MdpAction> policy) {
  const auto mu = induced_stationary(m, policy);
  double twin_mass = 0.0;
  for (int s = 0; s < m.num_states; ++s) {
    if (policy[static_cast<std::size_t>(s)] == MdpAction::twin) {
      twin_mass += mu[static_cast<std::size_t>(s)];
    }
  }
  return m.uniformization_rate * twin_mass;
}

MdpSolution solve_constrained(const std::shared_ptr<const MdpModel>& model, double Lambda,
                              double epsilon) {
  if (Lambda <= 0.0) throw Error("solve_constrained: Lambda must be > 0");

  std::vector<BisectionProbe> probes;
  auto probe = [&](double eta) {
    MdpSolution sol = relative_value_iteration(model, eta, epsilon);
    probes.push_back({eta, sol.achieved_rate});
    return sol;
  };

  MdpSolution feasible = probe(0.0);
  if (feasible.achieved_rate <= Lambda) {
    feasible.gain = feasible.cost_rate;
    feasible.probes = std::move(probes);
    return feasible;
  }

  double eta_lo = 0.0;
  double eta_hi = 1.0;
  MdpSolution sol_hi = probe(eta_hi);
  while (sol_hi.achieved_rate > Lambda) {
    eta_lo = eta_hi;
    eta_hi *= 2.0;
    if (eta_hi > 1e15) {
      throw NoConvergence("solve_constrained: no feasible multiplier below 1e15");
    }
    sol_hi = probe(eta_hi);
  }

  while (eta_hi - eta_lo > 1e-9 * std::max(1.0, eta_hi)) {
    const double mid = 0.5 * (eta_lo + eta_hi);
    MdpSolution sol = probe(mid);
    if (sol.achieved_rate <= Lambda) {
      eta_hi = mid;
      sol_hi = std::move(sol);
    } else {
      eta_lo = mid;
    }
  }

  sol_hi.gain = sol_hi.cost_rate;  // constrained objective excludes the multiplier charge
  sol_hi.probes = std::move(probes);
  return sol_hi;
}

MdpAction lookup_decide(const MdpSolution& solution, const MdpStateTuple& state) {
  if (!solution.model) throw UnknownState("lookup_decide: solution carries no model");
  const int idx = solution.model->state_of(state);
  if (idx < 0) throw UnknownState("lookup_decide: state not in the enumerated space");
  return solution.policy[static_cast<std::size_t>(idx)];
}

void export_solution(const MdpSolution& solution, std::ostream& out) {
  const MdpModel& m = *solution.model;
  out << "# eta=" << g12(solution.eta) << " gain=" << g12(solution.gain)
      << " cost_rate=" << g12(solution.cost_rate)
      << " achieved_rate=" << g12(solution.achieved_rate) << " states=" << m.num_states
      << '\n';
  for (int s = 0; s < m.num_states; ++s) {
    const auto t = m.unpack(m.packed[static_cast<std::size_t>(s)]);
    std::string enc = "s=";
    for (std::size_t i = 0; i < t.s.size(); ++i) {
      if (i) enc += ',';
      enc += std::to_string(t.s[i]);
    }
    enc += ";h=";
    for (std::size_t i = 0; i < t.s_hat.size(); ++i) {
      if (i) enc += ',';
      enc += std::to_string(t.s_hat[i]);
    }
    enc += ";b=";
    for (std::size_t i = 0; i < t.latch.size(); ++i) {
      enc += t.latch[i] ? '1' : '0';
    }
    out << enc << '\t'
        << (solution.policy[static_cast<std::size_t>(s)] == MdpAction::twin ? "twin" : "idle")
        << '\t' << g12(solution.bias[static_cast<std::size_t>(s)]) << '\n';
  }
}

}  // namespace twinsim
