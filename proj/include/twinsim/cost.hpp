#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twinsim/scenario.hpp"
#include "twinsim/trace.hpp"

namespace twinsim {

enum class CostKind { c1, c2, c3 };

// Distance catalog for C3. `euclidean` is the componentwise form
// sum_i sqrt((x_i - y_i)^2), which coincides with manhattan on scalars per
// system; `euclidean_l2` is the usual root-of-sum-of-squares norm.
enum class Distance { hamming, euclidean, euclidean_l2, manhattan, chebyshev, cosine };

Distance parse_distance(const std::string& name);
std::string distance_name(Distance d);

// Selects one of the three mismatch costs. C2 requires one weight per
// system. For C3, weights apply to the hamming distance only (unit weights
// when empty); other distances use raw label differences.
struct CostFunctionSpec {
  CostKind kind = CostKind::c1;
  std::vector<double> weights;
  Distance distance = Distance::euclidean;
  // Cosine distance of zero label vectors: both zero -> 0, exactly one
  // zero -> 1. Disabling makes those cases throw CosineZeroVector.
  bool cosine_zero_convention = true;

  std::string label() const;  // "c1", "c2", "c3-<distance>"
};

// Joint mismatch snapshot between the PS network and the DT. latch[i] records
// whether system i has transitioned since the sample time of the last
// completed sync; latch[i] = 0 implies s[i] == s_hat[i].
struct MismatchState {
  std::vector<int> s;
  std::vector<int> s_hat;
  std::vector<std::uint8_t> latch;
};

// 1 if any latch bit is set. Latched: a system that left and returned to its
// sampled state still counts until the next completed sync.
double cost_c1(const MismatchState& m);

// Weighted sum of latch bits.
double cost_c2(const MismatchState& m, std::span<const double> w);

// Distance between the label vectors of s and s_hat. Non-latching: depends
// only on the current states.
double cost_c3(const MismatchState& m, const CostFunctionSpec& spec,
               std::span<const StateLabels> labels);

double distance_value(Distance d, std::span<const double> x, std::span<const double> y,
                      std::span<const double> w, bool cosine_zero_convention);

// (1/horizon) * integral of the selected cost over [0, horizon], evaluated
// exactly as a sum over inter-event intervals. `labels` supplies the
// per-system label vectors for C3; C1/C2 ignore it.
double time_average_cost(const EventTrace& trace, const CostFunctionSpec& spec,
                         double horizon, std::span<const StateLabels> labels = {});

}  // namespace twinsim
