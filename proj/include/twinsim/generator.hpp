#pragma once

#include <span>
#include <utility>
#include <vector>

#include "twinsim/rng.hpp"

namespace twinsim {

// Infinitesimal generator of an irreducible continuous-time Markov chain.
// Instances only come out of validate_generator, which establishes the
// invariants: nonnegative off-diagonal rates, zero row sums, and a single
// communicating class. Immutable afterwards.
class GeneratorMatrix {
 public:
  int size() const { return n_; }
  double entry(int j, int k) const { return q_[static_cast<std::size_t>(j) * n_ + k]; }
  // Total exit rate of state j (negated diagonal).
  double exit_rate(int j) const { return -entry(j, j); }
  double max_abs_entry() const { return max_abs_; }
  double max_exit_rate() const { return max_exit_; }
  std::span<const double> row(int j) const {
    return {q_.data() + static_cast<std::size_t>(j) * n_, static_cast<std::size_t>(n_)};
  }

 private:
  friend GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& q);
  GeneratorMatrix() = default;

  int n_ = 0;
  double max_abs_ = 0.0;
  double max_exit_ = 0.0;
  std::vector<double> q_;  // row-major
};

struct StationaryDistribution {
  std::vector<double> pi;
};

// Checks square shape, n >= 2, nonnegative off-diagonals, zero row sums
// (within 1e-12 * max|q|) and irreducibility. Throws NegativeOffDiagonal,
// RowSumNonzero or Reducible naming the offending row/entry.
GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& q);

// Solves pi Q = 0, sum(pi) = 1 by a dense direct solve: one balance equation
// is replaced with the normalization row. Throws SingularSystem if the
// system is rank-deficient beyond the expected null direction.
StationaryDistribution stationary_distribution(const GeneratorMatrix& g);

// e^{Q tau} by uniformization: Poisson-weighted powers of the uniformized
// stochastic matrix, truncated so the neglected tail mass is <= 1e-13.
// Result is row-major, rows sum to 1 within 1e-10, entries clamped to [0,1].
std::vector<double> transition_matrix(const GeneratorMatrix& g, double tau);

// One jump of the embedded chain: exponential sojourn in `state` plus the
// next state drawn proportionally to the off-diagonal rates.
std::pair<double, int> sample_jump(const GeneratorMatrix& g, int state, RngStream& rng);

// Inverse-CDF draw from a stationary distribution.
int sample_stationary(const StationaryDistribution& pi, RngStream& rng);

}  // namespace twinsim
