#include "phmm/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace phmm {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kStationaryTolerance = 1e-9;

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidSource, what + " has a negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw Error(ErrorKind::InvalidSource, what + " sums to " + std::to_string(sum));
}

// out = Pi * v
void propagate(const MarkovSource& source, std::span<const double> v, std::span<double> out) {
  const std::size_t l = source.states();
  const std::span<const double> pi = source.transition_matrix();
  for (std::size_t i = 0; i < l; ++i) {
    double acc = 0.0;
    const double* row = pi.data() + i * l;
    for (std::size_t j = 0; j < l; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
}

}  // namespace

MarkovSource::MarkovSource(unsigned q, std::vector<double> stationary, std::vector<double> transition,
                           std::vector<double> outputs)
    : q_(q),
      states_(stationary.size()),
      stationary_(std::move(stationary)),
      transition_(std::move(transition)),
      outputs_(std::move(outputs)) {
  PrimeField field(q);  // validates q
  if (states_ == 0) throw Error(ErrorKind::InvalidSource, "source needs at least one state");
  if (transition_.size() != states_ * states_)
    throw Error(ErrorKind::InvalidSource, "transition matrix must be states x states");
  if (outputs_.size() != states_ * q_) throw Error(ErrorKind::InvalidSource, "outputs must be states x q");

  check_distribution(stationary_, "pi");
  std::vector<double> column(states_);
  for (std::size_t j = 0; j < states_; ++j) {
    for (std::size_t i = 0; i < states_; ++i) column[i] = transition_[i * states_ + j];
    check_distribution(column, "column " + std::to_string(j) + " of Pi");
  }
  for (std::size_t s = 0; s < states_; ++s)
    check_distribution(std::span<const double>(outputs_).subspan(s * q_, q_), "output distribution " + std::to_string(s));

  std::vector<double> moved(states_);
  propagate(*this, stationary_, moved);
  for (std::size_t i = 0; i < states_; ++i)
    if (std::abs(moved[i] - stationary_[i]) > kStationaryTolerance)
      throw Error(ErrorKind::InvalidSource, "pi is not stationary for Pi (component " + std::to_string(i) + ")");
}

double unit_uniform(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::size_t draw_categorical(std::span<const double> weights, double u) noexcept {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last;  // rounding left u beyond the final partial sum
}

SourceSample sample(const MarkovSource& source, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample length must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t l = source.states();
  const unsigned q = source.alphabet();
  const std::span<const double> pi = source.transition_matrix();
  const std::span<const double> outputs = source.output_matrix();

  SourceSample out;
  out.symbols.resize(n);
  out.states.resize(n);
  std::vector<double> column(l);
  std::size_t state = draw_categorical(source.stationary(), unit_uniform(rng()));
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      for (std::size_t i = 0; i < l; ++i) column[i] = pi[i * l + state];
      state = draw_categorical(column, unit_uniform(rng()));
    }
    out.states[t] = static_cast<std::uint32_t>(state);
    out.symbols[t] = static_cast<Symbol>(draw_categorical(outputs.subspan(state * q, q), unit_uniform(rng())));
  }
  return out;
}

BeliefState belief_update(const MarkovSource& source, const BeliefState& v, Symbol y) {
  const std::size_t l = source.states();
  if (v.probs.size() != l) throw Error(ErrorKind::DimensionMismatch, "belief has wrong state count");
  if (y >= source.alphabet()) throw Error(ErrorKind::InvalidArgument, "symbol outside F_q");
  BeliefState out{std::vector<double>(l)};
  propagate(source, v.probs, out.probs);
  double norm = 0.0;
  for (std::size_t z = 0; z < l; ++z) {
    out.probs[z] *= source.emission(z, y);
    norm += out.probs[z];
  }
  if (!(norm > 0.0))
    throw Error(ErrorKind::ImpossibleObservation, "symbol " + std::to_string(y) + " has zero likelihood");
  for (double& p : out.probs) p /= norm;
  return out;
}

SymbolDistribution predictive(const MarkovSource& source, const BeliefState& v) {
  const std::size_t l = source.states();
  const unsigned q = source.alphabet();
  if (v.probs.size() != l) throw Error(ErrorKind::DimensionMismatch, "belief has wrong state count");
  std::vector<double> moved(l);
  propagate(source, v.probs, moved);
  SymbolDistribution out{std::vector<double>(q, 0.0)};
  for (std::size_t z = 0; z < l; ++z)
    for (unsigned y = 0; y < q; ++y) out.probs[y] += moved[z] * source.emission(z, static_cast<Symbol>(y));
  return out;
}

SymbolDistribution forward_infer(const MarkovSource& source, std::size_t n, std::span<const Symbol> y) {
  if (n == 0 || y.size() != n - 1)
    throw Error(ErrorKind::DimensionMismatch, "forward_infer needs exactly n-1 observations");
  BeliefState s = source.initial_belief();
  for (Symbol obs : y) s = belief_update(source, s, obs);
  return predictive(source, s);
}

double entropy_rate_estimate(const MarkovSource& source, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (n == 0 || trials == 0) throw Error(ErrorKind::InvalidArgument, "n and trials must be positive");
  const double log_q = std::log(static_cast<double>(source.alphabet()));
  double total = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SourceSample s = sample(source, n, seed + trial);
    BeliefState v = source.initial_belief();
    double loss = 0.0;
    for (Symbol z : s.symbols) {
      const SymbolDistribution d = predictive(source, v);
      loss -= std::log(d.probs[z]) / log_q;
      v = belief_update(source, v, z);
    }
    total += loss / static_cast<double>(n);
  }
  return std::clamp(total / static_cast<double>(trials), 0.0, 1.0);
}

MarkovSource parse_source(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("source file is not valid JSON: ") + e.what());
  }
  try {
    const unsigned q = doc.at("q").get<unsigned>();
    const std::size_t l = doc.at("states").get<std::size_t>();
    auto pi = doc.at("pi").get<std::vector<double>>();
    auto rows = doc.at("Pi").get<std::vector<std::vector<double>>>();
    auto outs = doc.at("outputs").get<std::vector<std::vector<double>>>();
    if (pi.size() != l || rows.size() != l || outs.size() != l)
      throw Error(ErrorKind::InvalidSource, "pi, Pi and outputs must each have `states` entries");
    std::vector<double> transition, outputs;
    for (const auto& r : rows) {
      if (r.size() != l) throw Error(ErrorKind::InvalidSource, "Pi rows must have `states` entries");
      transition.insert(transition.end(), r.begin(), r.end());
    }
    for (const auto& r : outs) {
      if (r.size() != q) throw Error(ErrorKind::InvalidSource, "output rows must have q entries");
      outputs.insert(outputs.end(), r.begin(), r.end());
    }
    return MarkovSource(q, std::move(pi), std::move(transition), std::move(outputs));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("malformed source file: ") + e.what());
  }
}

std::string format_source(const MarkovSource& source) {
  const std::size_t l = source.states();
  const unsigned q = source.alphabet();
  nlohmann::json doc;
  doc["q"] = q;
  doc["states"] = l;
  doc["pi"] = std::vector<double>(source.stationary().begin(), source.stationary().end());
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < l; ++i) {
    auto r = source.transition_matrix().subspan(i * l, l);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  doc["Pi"] = std::move(rows);
  nlohmann::json outs = nlohmann::json::array();
  for (std::size_t s = 0; s < l; ++s) {
    auto r = source.output_matrix().subspan(s * q, q);
    outs.push_back(std::vector<double>(r.begin(), r.end()));
  }
  doc["outputs"] = std::move(outs);
  return doc.dump(2) + "\n";
}

MarkovSource load_source(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_source(ss.str());
}

void save_source(const MarkovSource& source, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::FormatError, "cannot write " + path.string());
  out << format_source(source);
}

}  // namespace phmm
