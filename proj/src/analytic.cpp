#include "twinsim/analytic.hpp"

#include <cmath>

#include "twinsim/errors.hpp"

namespace twinsim {

ExpectationForm parse_form(const std::string& name) {
  if (name == "diagonal") return ExpectationForm::diagonal;
  if (name == "sojourn") return ExpectationForm::sojourn;
  throw SchemaViolation("unknown expectation form '" + name + "'");
}

std::string form_name(ExpectationForm form) {
  return form == ExpectationForm::diagonal ? "diagonal" : "sojourn";
}

double same_state_probability(const GeneratorMatrix& g, const StationaryDistribution& pi,
                              double tau) {
  const auto p = transition_matrix(g, tau);
  const int n = g.size();
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    total += pi.pi[k] * p[static_cast<std::size_t>(k) * n + k];
  }
  return total;
}

double holding_probability(const GeneratorMatrix& g, const StationaryDistribution& pi,
                           double tau) {
  double total = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    total += pi.pi[k] * std::exp(-g.exit_rate(k) * tau);
  }
  return total;
}

namespace {

double in_sync_probability(const PsSystem& sys, double tau, ExpectationForm form) {
  return form == ExpectationForm::diagonal ? same_state_probability(sys.gen, sys.pi, tau)
                                           : holding_probability(sys.gen, sys.pi, tau);
}

void check_time(double t) {
  if (t < 0.0) throw Error("expected cost: t must be >= 0");
}

}  // namespace

double expected_cost_c1(const ScenarioSpec& scenario, double t, ExpectationForm form) {
  check_time(t);
  const double tau = t + scenario.delta;
  double product = 1.0;
  for (const auto& sys : scenario.systems) {
    product *= in_sync_probability(sys, tau, form);
  }
  return 1.0 - product;
}

double expected_cost_c2(const ScenarioSpec& scenario, std::span<const double> w, double t,
                        ExpectationForm form) {
  check_time(t);
  if (w.size() != scenario.systems.size()) {
    throw WeightLengthMismatch("expected_cost_c2: weight count does not match system count");
  }
  const double tau = t + scenario.delta;
  double total = 0.0;
  for (std::size_t i = 0; i < scenario.systems.size(); ++i) {
    total += w[i] * (1.0 - in_sync_probability(scenario.systems[i], tau, form));
  }
  return total;
}

double expected_cost_c3_hamming(const ScenarioSpec& scenario, std::span<const double> w,
                                double t) {
  check_time(t);
  if (w.size() != scenario.systems.size()) {
    throw WeightLengthMismatch("expected_cost_c3_hamming: weight count does not match system count");
  }
  const double tau = t + scenario.delta;
  double total = 0.0;
  for (std::size_t i = 0; i < scenario.systems.size(); ++i) {
    const auto& sys = scenario.systems[i];
    total += w[i] * (1.0 - same_state_probability(sys.gen, sys.pi, tau));
  }
  return total;
}

}  // namespace twinsim
