#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phmm/field.hpp"

namespace phmm {

// Marks an unspecified (dropped) coordinate of a transformed vector.
inline constexpr Symbol kUnspecified = 0xFF;

// The operator M^{(x)t} on vectors of length m = k^t.
//
// Index convention: coordinate p has base-k digits p = sum_d p_d k^d, and
// the transform applies M along every digit. Equivalently, a length-m
// vector is split by p mod k into k interleaved sub-vectors, each is
// transformed at depth t-1, and M is applied across the k results at each
// position. This is the natural-order Kronecker product with no bit
// reversal, and every component of the pipeline uses it.
class TransformPlan {
 public:
  TransformPlan(KernelMatrix kernel, std::size_t depth);

  const KernelMatrix& kernel() const noexcept { return kernel_; }
  const PrimeField& field() const noexcept { return kernel_.field(); }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t arity() const noexcept { return kernel_.size(); }

  // Returns M^{(x)t} z. O(m log m) field operations.
  std::vector<Symbol> forward(std::span<const Symbol> z) const;
  // Returns (M^-1)^{(x)t} u. Throws UnspecifiedSymbol if u holds kUnspecified.
  std::vector<Symbol> inverse(std::span<const Symbol> u) const;

  // In-place variants; `data.size()` must equal length().
  void forward_in_place(std::span<Symbol> data) const;
  void inverse_in_place(std::span<Symbol> data) const;

 private:
  void butterfly(std::span<Symbol> data, bool inverse) const;

  KernelMatrix kernel_;
  std::size_t depth_;
  std::size_t length_;
};

inline std::vector<Symbol> polar_transform(const TransformPlan& plan, std::span<const Symbol> z) {
  return plan.forward(z);
}

inline std::vector<Symbol> polar_inverse(const TransformPlan& plan, std::span<const Symbol> u) {
  return plan.inverse(u);
}

}  // namespace phmm
