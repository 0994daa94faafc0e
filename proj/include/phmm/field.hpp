#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phmm/error.hpp"

namespace phmm {

// One element of F_q. The modulus lives in the enclosing PrimeField.
using Symbol = std::uint8_t;

inline constexpr unsigned kMaxModulus = 251;

// Prime field F_q with q <= 251. Inverses are tabulated at construction.
class PrimeField {
 public:
  explicit PrimeField(unsigned q);

  unsigned modulus() const noexcept { return q_; }

  Symbol reduce(long long v) const noexcept {
    long long r = v % static_cast<long long>(q_);
    return static_cast<Symbol>(r < 0 ? r + q_ : r);
  }
  Symbol add(Symbol a, Symbol b) const noexcept {
    unsigned s = unsigned{a} + b;
    return static_cast<Symbol>(s >= q_ ? s - q_ : s);
  }
  Symbol sub(Symbol a, Symbol b) const noexcept {
    return static_cast<Symbol>(a >= b ? a - b : a + q_ - b);
  }
  Symbol neg(Symbol a) const noexcept { return static_cast<Symbol>(a == 0 ? 0 : q_ - a); }
  Symbol mul(Symbol a, Symbol b) const noexcept {
    return static_cast<Symbol>((unsigned{a} * b) % q_);
  }
  // Throws InvalidArgument for a == 0.
  Symbol inv(Symbol a) const;

  bool contains(unsigned v) const noexcept { return v < q_; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept { return a.q_ == b.q_; }

 private:
  unsigned q_;
  std::vector<Symbol> inverse_;
};

bool is_prime(unsigned v) noexcept;

// Square kernel matrix over F_q, stored row-major together with its inverse.
class KernelMatrix {
 public:
  // `entries` is row-major k*k; values are reduced mod q.
  KernelMatrix(const PrimeField& field, std::size_t k, std::span<const long long> entries);

  // Arikan's kernel in column-vector form, [[1,1],[0,1]]: M^{(x)t} z equals
  // the row-vector product z G_m. The lower-triangular [[1,0],[1,1]] does
  // not polarize when coordinates are decoded in ascending order.
  static KernelMatrix arikan(const PrimeField& field);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t size() const noexcept { return k_; }

  Symbol at(std::size_t row, std::size_t col) const noexcept { return entries_[row * k_ + col]; }
  Symbol inverse_at(std::size_t row, std::size_t col) const noexcept { return inverse_[row * k_ + col]; }

  std::span<const Symbol> entries() const noexcept { return entries_; }
  std::span<const Symbol> inverse_entries() const noexcept { return inverse_; }

  // M*v, or M^-1*v when `inverse` is set.
  std::vector<Symbol> apply(std::span<const Symbol> v, bool inverse = false) const;
  // Same as apply, writing into `out` (|out| == k, must not alias v).
  void apply_into(std::span<const Symbol> v, std::span<Symbol> out, bool inverse = false) const;

  friend bool operator==(const KernelMatrix& a, const KernelMatrix& b) noexcept {
    return a.field_ == b.field_ && a.k_ == b.k_ && a.entries_ == b.entries_;
  }

 private:
  PrimeField field_;
  std::size_t k_;
  std::vector<Symbol> entries_;
  std::vector<Symbol> inverse_;
};

inline std::vector<Symbol> mat_vec(const KernelMatrix& kernel, std::span<const Symbol> v, bool inverse = false) {
  return kernel.apply(v, inverse);
}

}  // namespace phmm
