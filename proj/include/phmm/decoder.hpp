#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phmm/hmm.hpp"
#include "phmm/transform.hpp"

namespace phmm {

// A transformed vector in which some coordinates are unspecified
// (kUnspecified). Specified coordinates are the retained set S.
struct PartialVector {
  std::vector<Symbol> entries;

  static PartialVector unspecified(std::size_t m) { return PartialVector{std::vector<Symbol>(m, kUnspecified)}; }

  std::size_t size() const noexcept { return entries.size(); }
  bool specified(std::size_t p) const noexcept { return entries[p] != kUnspecified; }
};

// Independent per-coordinate priors on Z, stored flat as m rows of q
// probabilities.
class PriorProfile {
 public:
  PriorProfile(unsigned q, std::size_t m) : q_(q), m_(m), probs_(m * q, 0.0) {}
  explicit PriorProfile(std::span<const SymbolDistribution> dists);

  unsigned alphabet() const noexcept { return q_; }
  std::size_t size() const noexcept { return m_; }

  std::span<const double> at(std::size_t p) const noexcept { return {probs_.data() + p * q_, q_}; }
  std::span<double> at(std::size_t p) noexcept { return {probs_.data() + p * q_, q_}; }
  void set(std::size_t p, const SymbolDistribution& d);

  std::span<const double> flat() const noexcept { return probs_; }

 private:
  unsigned q_;
  std::size_t m_;
  std::vector<double> probs_;
};

struct DecodeResult {
  std::vector<Symbol> z_hat;
  std::vector<Symbol> u_hat;
};

// Successive-cancellation decoder for U = M^{(x)t} Z under a product prior
// on Z. Coordinates of U are decided in index order from their exact
// conditional given the decisions so far. Conditionals come from a
// recursion over the kernel tree: each node combines k interleaved child
// problems by enumerating the kernel's q^k input tuples. Ties go to the
// smallest field element; a node whose mass is zero becomes uniform.
//
// Holds per-depth scratch buffers, so one instance may be reused across
// calls but not shared between threads.
class ScDecoder {
 public:
  explicit ScDecoder(const TransformPlan& plan);

  DecodeResult decode(const PriorProfile& prior, const PartialVector& u);

  // Genie-aided pass: every coordinate pinned to u_true = M^{(x)t} z_true.
  // Returns the m conditionals P(U_p | U_<p = u_true,<p), flat m x q.
  std::vector<double> scan(const PriorProfile& prior, std::span<const Symbol> z_true);

 private:
  enum class Mode { Decode, Scan };

  void check(const PriorProfile& prior, std::size_t m) const;
  void node(std::size_t depth, std::span<const double> priors, std::span<const Symbol> u, std::size_t offset,
            std::span<Symbol> u_hat, std::span<Symbol> x);
  void leaf(std::span<const double> prior, Symbol given, std::size_t offset, std::span<Symbol> u_hat,
            std::span<Symbol> x);

  const TransformPlan* plan_;
  unsigned q_;
  std::size_t k_;
  std::size_t tuples_;             // q^k
  std::vector<std::size_t> pow_q_;  // q^0 .. q^k
  std::vector<Symbol> image_;      // tuples_ x k: M^-1 applied to each digit tuple
  std::vector<std::vector<double>> child_priors_;
  std::vector<std::vector<Symbol>> child_x_;
  std::vector<double> acc_;
  Mode mode_ = Mode::Decode;
  std::vector<double>* conditionals_ = nullptr;
};

DecodeResult sc_decode(const TransformPlan& plan, const PriorProfile& prior, const PartialVector& u);

std::vector<SymbolDistribution> sc_scan(const TransformPlan& plan, const PriorProfile& prior,
                                        std::span<const Symbol> z_true);

}  // namespace phmm
