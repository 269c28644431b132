#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twinsim/generator.hpp"

namespace twinsim {

// Numeric label per state, used by distance-based costs. Defaults to the
// state index.
struct StateLabels {
  std::vector<double> values;
};

// What happens to an in-flight synchronization when a new query arrives:
// preempt aborts it, parallel lets every query complete in issue order.
enum class OverlapPolicy { preempt, parallel };

struct PsSystem {
  std::string name;
  GeneratorMatrix gen;
  double weight = 1.0;
  StateLabels labels;
  StationaryDistribution pi;
};

// Initial joint state: a fixed tuple, or a stationary product draw if unset.
struct InitialCondition {
  std::optional<std::vector<int>> fixed;
};

// The physical-system network plus the synchronization semantics: K
// independent chains, sync delay delta, overlap rule and initial condition.
struct ScenarioSpec {
  std::vector<PsSystem> systems;
  double delta = 0.0;
  OverlapPolicy overlap = OverlapPolicy::preempt;
  InitialCondition initial;

  int num_systems() const { return static_cast<int>(systems.size()); }
  std::vector<double> weights() const;
};

// Validates the generator, solves its stationary distribution and installs
// default labels when none are given.
PsSystem make_system(std::string name, const std::vector<std::vector<double>>& q,
                     double weight = 1.0, std::vector<double> labels = {});

// Checks K >= 1, delta >= 0, nonnegative weights and that a fixed initial
// state is in range.
ScenarioSpec make_scenario(std::vector<PsSystem> systems, double delta,
                           OverlapPolicy overlap = OverlapPolicy::preempt,
                           InitialCondition initial = {});

// Aggregate stationary event rate sigma = sum_i sum_j pi_ij * r_ij.
double total_event_rate(const ScenarioSpec& scenario);

}  // namespace twinsim
