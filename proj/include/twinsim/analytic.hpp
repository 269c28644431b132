#pragma once

#include <span>
#include <string>

#include "twinsim/scenario.hpp"

namespace twinsim {

// Two closed forms for the per-system "still in sync" probability at elapsed
// time tau since the sample, which differ on chains that can return to a
// state:
//   diagonal — sum_k pi_k (e^{Q tau})_kk, the probability the chain occupies
//              its sampled state at tau (return paths included). Exact for
//              instantaneous state mismatch.
//   sojourn  — sum_k pi_k e^{-r_k tau}, the probability the chain never left
//              its sampled state. Exact for latched costs.
enum class ExpectationForm { diagonal, sojourn };

ExpectationForm parse_form(const std::string& name);
std::string form_name(ExpectationForm form);

// sum_k pi_k (e^{Q tau})_kk.
double same_state_probability(const GeneratorMatrix& g, const StationaryDistribution& pi,
                              double tau);

// sum_k pi_k e^{-r_k tau}.
double holding_probability(const GeneratorMatrix& g, const StationaryDistribution& pi,
                           double tau);

// Expected C1 at time t after a sync whose sample was taken delta earlier:
// 1 - prod_i p_i(t + delta), with p_i per `form` (systems are independent).
double expected_cost_c1(const ScenarioSpec& scenario, double t, ExpectationForm form);

// Expected C2: sum_i w_i (1 - p_i(t + delta)).
double expected_cost_c2(const ScenarioSpec& scenario, std::span<const double> w, double t,
                        ExpectationForm form);

// Expected weighted-hamming C3: sum_i w_i (1 - same_state_probability_i(t +
// delta)). The diagonal form is exact here; instantaneous mismatch is
// precisely "not occupying the sampled state".
double expected_cost_c3_hamming(const ScenarioSpec& scenario, std::span<const double> w,
                                double t);

}  // namespace twinsim
