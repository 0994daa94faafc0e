#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "phmm/field.hpp"

namespace phmm {

// Posterior over hidden states.
struct BeliefState {
  std::vector<double> probs;

  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

// Distribution over F_q.
struct SymbolDistribution {
  std::vector<double> probs;

  friend bool operator==(const SymbolDistribution&, const SymbolDistribution&) = default;
};

// Hidden Markov source over F_q.
//
// The transition matrix is column-stochastic: transition(next, cur) is
// P(X_{t+1} = next | X_t = cur), so propagating a belief is a plain
// matrix-vector product. The stationary distribution is supplied, not
// derived, and is checked against the transition matrix.
class MarkovSource {
 public:
  // `transition` is row-major states x states, `outputs` row-major states x q.
  MarkovSource(unsigned q, std::vector<double> stationary, std::vector<double> transition,
               std::vector<double> outputs);

  std::size_t states() const noexcept { return states_; }
  unsigned alphabet() const noexcept { return q_; }

  double transition(std::size_t next, std::size_t cur) const noexcept { return transition_[next * states_ + cur]; }
  double emission(std::size_t state, Symbol y) const noexcept { return outputs_[state * q_ + y]; }

  std::span<const double> stationary() const noexcept { return stationary_; }
  std::span<const double> transition_matrix() const noexcept { return transition_; }
  std::span<const double> output_matrix() const noexcept { return outputs_; }

  BeliefState initial_belief() const { return BeliefState{stationary_}; }

  friend bool operator==(const MarkovSource&, const MarkovSource&) = default;

 private:
  unsigned q_;
  std::size_t states_;
  std::vector<double> stationary_;
  std::vector<double> transition_;
  std::vector<double> outputs_;
};

struct SourceSample {
  std::vector<Symbol> symbols;
  std::vector<std::uint32_t> states;
};

// Deterministic given `seed`.
SourceSample sample(const MarkovSource& source, std::size_t n, std::uint64_t seed);

// One step of Bayesian filtering: v'(z) proportional to (Pi v)_z * S_z(y).
// Throws ImpossibleObservation when y has zero likelihood.
BeliefState belief_update(const MarkovSource& source, const BeliefState& v, Symbol y);

// Next-symbol distribution E_{z ~ Pi v}[S_z].
SymbolDistribution predictive(const MarkovSource& source, const BeliefState& v);

// Distribution of Y_n given Y_1..Y_{n-1} = y, computed from scratch in
// O(n * states^2). Equal, bit for bit, to predictive() applied after
// folding belief_update over y from the stationary distribution.
SymbolDistribution forward_infer(const MarkovSource& source, std::size_t n, std::span<const Symbol> y);

// Mean of -(1/n) sum_t log_q P(Z_t | Z_<t) over `trials` sampled
// sequences. Trial i uses seed + i. Result is in q-ary symbols per source
// symbol.
double entropy_rate_estimate(const MarkovSource& source, std::size_t n, std::size_t trials, std::uint64_t seed);

// Source specification files (JSON text, see README).
MarkovSource parse_source(const std::string& text);
std::string format_source(const MarkovSource& source);
MarkovSource load_source(const std::filesystem::path& path);
void save_source(const MarkovSource& source, const std::filesystem::path& path);

// Uniform double in [0, 1) from 53 random bits; platform independent.
double unit_uniform(std::uint64_t bits) noexcept;

// Index drawn from `weights` (summing to ~1) by inverse CDF.
std::size_t draw_categorical(std::span<const double> weights, double u) noexcept;

}  // namespace phmm
