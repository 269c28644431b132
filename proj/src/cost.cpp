#include "twinsim/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "twinsim/errors.hpp"

namespace twinsim {

Distance parse_distance(const std::string& name) {
  if (name == "hamming") return Distance::hamming;
  if (name == "euclidean") return Distance::euclidean;
  if (name == "euclidean_l2") return Distance::euclidean_l2;
  if (name == "manhattan") return Distance::manhattan;
  if (name == "chebyshev") return Distance::chebyshev;
  if (name == "cosine") return Distance::cosine;
  throw SchemaViolation("unknown distance '" + name + "'");
}

std::string distance_name(Distance d) {
  switch (d) {
    case Distance::hamming: return "hamming";
    case Distance::euclidean: return "euclidean";
    case Distance::euclidean_l2: return "euclidean_l2";
    case Distance::manhattan: return "manhattan";
    case Distance::chebyshev: return "chebyshev";
    case Distance::cosine: return "cosine";
  }
  return "?";
}

std::string CostFunctionSpec::label() const {
  switch (kind) {
    case CostKind::c1: return "c1";
    case CostKind::c2: return "c2";
    case CostKind::c3: return "c3-" + distance_name(distance);
  }
  return "?";
}

double cost_c1(const MismatchState& m) {
  for (auto b : m.latch) {
    if (b) return 1.0;
  }
  return 0.0;
}

double cost_c2(const MismatchState& m, std::span<const double> w) {
  if (w.size() != m.latch.size()) {
    throw WeightLengthMismatch("cost_c2: " + std::to_string(w.size()) + " weights for " +
                               std::to_string(m.latch.size()) + " systems");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (m.latch[i]) total += w[i];
  }
  return total;
}

double distance_value(Distance d, std::span<const double> x, std::span<const double> y,
                      std::span<const double> w, bool cosine_zero_convention) {
  const std::size_t k = x.size();
  switch (d) {
    case Distance::hamming: {
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (x[i] != y[i]) total += w.empty() ? 1.0 : w[i];
      }
      return total;
    }
    case Distance::euclidean: {
      // Componentwise roots: sum_i sqrt((x_i - y_i)^2).
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += std::fabs(x[i] - y[i]);
      return total;
    }
    case Distance::euclidean_l2: {
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += (x[i] - y[i]) * (x[i] - y[i]);
      return std::sqrt(total);
    }
    case Distance::manhattan: {
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += std::fabs(x[i] - y[i]);
      return total;
    }
    case Distance::chebyshev: {
      double worst = 0.0;
      for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::fabs(x[i] - y[i]));
      return worst;
    }
    case Distance::cosine: {
      double xx = 0.0, yy = 0.0, xy = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        xy += x[i] * y[i];
      }
      if (xx == 0.0 || yy == 0.0) {
        if (!cosine_zero_convention) {
          throw CosineZeroVector("cosine distance of a zero label vector");
        }
        return (xx == 0.0 && yy == 0.0) ? 0.0 : 1.0;
      }
      return 1.0 - xy / (std::sqrt(xx) * std::sqrt(yy));
    }
  }
  return 0.0;
}

namespace {

double label_of(std::span<const StateLabels> labels, std::size_t i, int state) {
  if (labels.empty()) return static_cast<double>(state);
  return labels[i].values.at(static_cast<std::size_t>(state));
}

}  // namespace

double cost_c3(const MismatchState& m, const CostFunctionSpec& spec,
               std::span<const StateLabels> labels) {
  const std::size_t k = m.s.size();
  if (!spec.weights.empty() && spec.weights.size() != k) {
    throw WeightLengthMismatch("cost_c3: weight count does not match system count");
  }
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = label_of(labels, i, m.s[i]);
    y[i] = label_of(labels, i, m.s_hat[i]);
  }
  return distance_value(spec.distance, x, y, spec.weights, spec.cosine_zero_convention);
}

double time_average_cost(const EventTrace& trace, const CostFunctionSpec& spec,
                         double horizon, std::span<const StateLabels> labels) {
  const std::size_t k = trace.initial_state.size();
  if (spec.kind == CostKind::c2 && spec.weights.size() != k) {
    throw WeightLengthMismatch("time_average_cost: c2 weight count does not match trace");
  }
  double integral = 0.0;
  MismatchState scratch;
  replay_trace(trace, horizon, [&](double t0, double t1, const PlaybackState& view) {
    scratch.s.assign(view.s.begin(), view.s.end());
    scratch.s_hat.assign(view.s_hat.begin(), view.s_hat.end());
    scratch.latch.assign(view.latch.begin(), view.latch.end());
    double c = 0.0;
    switch (spec.kind) {
      case CostKind::c1: c = cost_c1(scratch); break;
      case CostKind::c2: c = cost_c2(scratch, spec.weights); break;
      case CostKind::c3: c = cost_c3(scratch, spec, labels); break;
    }
    integral += c * (t1 - t0);
  });
  return integral / horizon;
}

}  // namespace twinsim
