#include "twinsim/scenario.hpp"

#include <stdexcept>

#include "twinsim/errors.hpp"

namespace twinsim {

std::vector<double> ScenarioSpec::weights() const {
  std::vector<double> w;
  w.reserve(systems.size());
  for (const auto& s : systems) w.push_back(s.weight);
  return w;
}

PsSystem make_system(std::string name, const std::vector<std::vector<double>>& q,
                     double weight, std::vector<double> labels) {
  if (weight < 0.0) {
    throw Error("system '" + name + "': weight must be nonnegative");
  }
  PsSystem sys;
  sys.name = std::move(name);
  sys.gen = validate_generator(q);
  sys.weight = weight;
  if (labels.empty()) {
    labels.resize(sys.gen.size());
    for (int k = 0; k < sys.gen.size(); ++k) labels[k] = k;
  } else if (static_cast<int>(labels.size()) != sys.gen.size()) {
    throw Error("system '" + sys.name + "': label count does not match state count");
  }
  sys.labels = StateLabels{std::move(labels)};
  sys.pi = stationary_distribution(sys.gen);
  return sys;
}

ScenarioSpec make_scenario(std::vector<PsSystem> systems, double delta,
                           OverlapPolicy overlap, InitialCondition initial) {
  if (systems.empty()) throw Error("scenario requires at least one system");
  if (delta < 0.0) throw Error("scenario: delta must be >= 0");
  if (initial.fixed) {
    const auto& fixed = *initial.fixed;
    if (fixed.size() != systems.size()) {
      throw Error("scenario: fixed initial state has wrong arity");
    }
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      if (fixed[i] < 0 || fixed[i] >= systems[i].gen.size()) {
        throw Error("scenario: fixed initial state out of range for system '" +
                    systems[i].name + "'");
      }
    }
  }
  ScenarioSpec spec;
  spec.systems = std::move(systems);
  spec.delta = delta;
  spec.overlap = overlap;
  spec.initial = std::move(initial);
  return spec;
}

double total_event_rate(const ScenarioSpec& scenario) {
  double sigma = 0.0;
  for (const auto& sys : scenario.systems) {
    for (int j = 0; j < sys.gen.size(); ++j) {
      sigma += sys.pi.pi[j] * sys.gen.exit_rate(j);
    }
  }
  return sigma;
}

}  // namespace twinsim
