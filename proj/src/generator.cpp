#include "twinsim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "twinsim/errors.hpp"

namespace twinsim {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

// Reachability sweep over the nonzero off-diagonal pattern. `transpose`
// follows edges backwards.
std::vector<char> reachable_from_zero(const GeneratorMatrix& g, bool transpose) {
  const int n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (k == j || seen[k]) continue;
      const double rate = transpose ? g.entry(k, j) : g.entry(j, k);
      if (rate > 0.0) {
        seen[k] = 1;
        stack.push_back(k);
      }
    }
  }
  return seen;
}

// Gaussian elimination with partial pivoting; a is row-major n x n, b length n.
// Overwrites both; returns the solution in b.
void solve_dense(int n, std::vector<double>& a, std::vector<double>& b) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(a[static_cast<std::size_t>(r) * n + col]) >
          std::fabs(a[static_cast<std::size_t>(pivot) * n + col])) {
        pivot = r;
      }
    }
    const double head = a[static_cast<std::size_t>(pivot) * n + col];
    if (std::fabs(head) < 1e-300) {
      throw SingularSystem(fmt("stationary solve: zero pivot in column %d", col));
    }
    if (pivot != col) {
      for (int c = col; c < n; ++c) {
        std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                  a[static_cast<std::size_t>(col) * n + c]);
      }
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * n + col] /
                            a[static_cast<std::size_t>(col) * n + col];
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) {
        a[static_cast<std::size_t>(r) * n + c] -=
            factor * a[static_cast<std::size_t>(col) * n + c];
      }
      b[r] -= factor * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) {
      acc -= a[static_cast<std::size_t>(r) * n + c] * b[c];
    }
    b[r] = acc / a[static_cast<std::size_t>(r) * n + r];
  }
}

std::vector<double> multiply(int n, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = a[static_cast<std::size_t>(i) * n + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(i) * n + j] += aik * b[static_cast<std::size_t>(k) * n + j];
      }
    }
  }
  return out;
}

void clamp_unit_interval(std::vector<double>& m) {
  for (double& x : m) x = std::clamp(x, 0.0, 1.0);
}

// Past this Poisson mean the series is computed on half the horizon and
// squared; keeps term counts small and weights far from underflow.
constexpr double kSplitThreshold = 64.0;
constexpr double kTailMass = 1e-13;

}  // namespace

GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& q) {
  const int n = static_cast<int>(q.size());
  if (n < 2) throw Error(fmt("generator must have at least 2 states, got %d", n));
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(q[j].size()) != n) {
      throw Error(fmt("generator row %d has %zu entries, expected %d", j, q[j].size(), n));
    }
  }

  GeneratorMatrix g;
  g.n_ = n;
  g.q_.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      g.q_[static_cast<std::size_t>(j) * n + k] = q[j][k];
      g.max_abs_ = std::max(g.max_abs_, std::fabs(q[j][k]));
    }
  }

  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k != j && q[j][k] < 0.0) {
        throw NegativeOffDiagonal(
            fmt("generator entry (%d,%d) = %g is negative", j, k, q[j][k]));
      }
      sum += q[j][k];
    }
    if (std::fabs(sum) > 1e-12 * std::max(g.max_abs_, 1e-300)) {
      throw RowSumNonzero(fmt("generator row %d sums to %g, expected 0", j, sum));
    }
    g.max_exit_ = std::max(g.max_exit_, -q[j][j]);
  }

  const auto fwd = reachable_from_zero(g, false);
  const auto bwd = reachable_from_zero(g, true);
  for (int j = 0; j < n; ++j) {
    if (!fwd[j]) throw Reducible(fmt("state %d is not reachable from state 0", j));
    if (!bwd[j]) throw Reducible(fmt("state 0 is not reachable from state %d", j));
  }
  return g;
}

StationaryDistribution stationary_distribution(const GeneratorMatrix& g) {
  const int n = g.size();
  // Solve Q^T pi = 0 with the last balance equation replaced by sum(pi) = 1.
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  std::vector<double> b(n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      a[static_cast<std::size_t>(r) * n + c] = g.entry(c, r);
    }
  }
  for (int c = 0; c < n; ++c) a[static_cast<std::size_t>(n - 1) * n + c] = 1.0;
  b[n - 1] = 1.0;
  solve_dense(n, a, b);

  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (b[k] < -1e-9) {
      throw SingularSystem(fmt("stationary solve: pi[%d] = %g is negative", k, b[k]));
    }
    b[k] = std::max(b[k], 0.0);
    sum += b[k];
  }
  for (double& x : b) x /= sum;

  // Residual check against the full balance equations.
  double residual = 0.0;
  for (int c = 0; c < n; ++c) {
    double dot = 0.0;
    for (int r = 0; r < n; ++r) dot += b[r] * g.entry(r, c);
    residual = std::max(residual, std::fabs(dot));
  }
  if (residual > 1e-10 * std::max(g.max_abs_entry(), 1e-300)) {
    throw SingularSystem(fmt("stationary solve: balance residual %g too large", residual));
  }
  return StationaryDistribution{std::move(b)};
}

std::vector<double> transition_matrix(const GeneratorMatrix& g, double tau) {
  if (tau < 0.0) throw Error(fmt("transition_matrix: tau = %g must be >= 0", tau));
  const int n = g.size();
  std::vector<double> identity(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) identity[static_cast<std::size_t>(j) * n + j] = 1.0;

  const double lambda = g.max_exit_rate();
  if (tau == 0.0 || lambda == 0.0) return identity;

  const double mean = lambda * tau;
  if (mean > kSplitThreshold) {
    auto half = transition_matrix(g, tau / 2.0);
    auto full = multiply(n, half, half);
    clamp_unit_interval(full);
    return full;
  }

  // Uniformized stochastic matrix P = I + Q / lambda.
  std::vector<double> p(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      p[static_cast<std::size_t>(j) * n + k] =
          g.entry(j, k) / lambda + (j == k ? 1.0 : 0.0);
    }
  }

  std::vector<double> result(identity);
  double weight = std::exp(-mean);  // Poisson pmf at m = 0
  double cumulative = weight;
  for (double& x : result) x *= weight;

  std::vector<double> power(identity);
  for (int m = 1; cumulative < 1.0 - kTailMass; ++m) {
    power = multiply(n, power, p);
    weight *= mean / m;
    cumulative += weight;
    for (std::size_t i = 0; i < result.size(); ++i) result[i] += weight * power[i];
    if (m > 10 * kSplitThreshold + 200) break;  // paranoia guard
  }
  clamp_unit_interval(result);
  return result;
}

std::pair<double, int> sample_jump(const GeneratorMatrix& g, int state, RngStream& rng) {
  const double rate = g.exit_rate(state);
  const double sojourn = rng.exponential(rate);
  const double u = rng.uniform01() * rate;
  double cum = 0.0;
  int next = -1;
  for (int k = 0; k < g.size(); ++k) {
    if (k == state) continue;
    const double r = g.entry(state, k);
    if (r <= 0.0) continue;
    cum += r;
    next = k;
    if (u < cum) break;
  }
  return {sojourn, next};
}

int sample_stationary(const StationaryDistribution& pi, RngStream& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  int last = 0;
  for (int k = 0; k < static_cast<int>(pi.pi.size()); ++k) {
    if (pi.pi[k] <= 0.0) continue;
    cum += pi.pi[k];
    last = k;
    if (u < cum) return k;
  }
  return last;
}

}  // namespace twinsim
