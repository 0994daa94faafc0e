#include "phmm/field.hpp"

#include <string>
#include <utility>

namespace phmm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CompositeModulus: return "CompositeModulus";
    case ErrorKind::SingularKernel: return "SingularKernel";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidSource: return "InvalidSource";
    case ErrorKind::ImpossibleObservation: return "ImpossibleObservation";
    case ErrorKind::UnspecifiedSymbol: return "UnspecifiedSymbol";
    case ErrorKind::StreamCorrupt: return "StreamCorrupt";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::DigestMismatch: return "DigestMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidPreset: return "InvalidPreset";
  }
  return "Unknown";
}

bool is_prime(unsigned v) noexcept {
  if (v < 2) return false;
  for (unsigned d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

namespace {

// Extended Euclid; returns x with a*x == 1 (mod q), assuming gcd(a, q) == 1.
unsigned euclid_inverse(unsigned a, unsigned q) {
  long long old_r = a, r = q;
  long long old_s = 1, s = 0;
  while (r != 0) {
    long long quot = old_r / r;
    old_r = std::exchange(r, old_r - quot * r);
    old_s = std::exchange(s, old_s - quot * s);
  }
  long long x = old_s % static_cast<long long>(q);
  return static_cast<unsigned>(x < 0 ? x + q : x);
}

}  // namespace

PrimeField::PrimeField(unsigned q) : q_(q) {
  if (q < 2 || q > kMaxModulus)
    throw Error(ErrorKind::InvalidArgument, "modulus " + std::to_string(q) + " outside [2, 251]");
  if (!is_prime(q))
    throw Error(ErrorKind::CompositeModulus, "modulus " + std::to_string(q) + " is not prime");
  inverse_.assign(q, 0);
  for (unsigned a = 1; a < q; ++a)
    inverse_[a] = static_cast<Symbol>(euclid_inverse(a, q));
}

Symbol PrimeField::inv(Symbol a) const {
  if (a == 0 || a >= q_)
    throw Error(ErrorKind::InvalidArgument, "no inverse for " + std::to_string(a) + " mod " + std::to_string(q_));
  return inverse_[a];
}

KernelMatrix::KernelMatrix(const PrimeField& field, std::size_t k, std::span<const long long> entries)
    : field_(field), k_(k) {
  if (k == 0 || entries.size() != k * k)
    throw Error(ErrorKind::DimensionMismatch,
                "kernel needs " + std::to_string(k * k) + " entries, got " + std::to_string(entries.size()));
  entries_.reserve(k * k);
  for (long long e : entries) entries_.push_back(field_.reduce(e));

  // Gauss-Jordan on [M | I].
  std::vector<Symbol> a = entries_;
  inverse_.assign(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) inverse_[i * k + i] = 1;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && a[pivot * k + col] == 0) ++pivot;
    if (pivot == k) throw Error(ErrorKind::SingularKernel, "kernel is not invertible mod " + std::to_string(field_.modulus()));
    if (pivot != col) {
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(a[pivot * k + j], a[col * k + j]);
        std::swap(inverse_[pivot * k + j], inverse_[col * k + j]);
      }
    }
    Symbol scale = field_.inv(a[col * k + col]);
    for (std::size_t j = 0; j < k; ++j) {
      a[col * k + j] = field_.mul(a[col * k + j], scale);
      inverse_[col * k + j] = field_.mul(inverse_[col * k + j], scale);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || a[r * k + col] == 0) continue;
      Symbol f = a[r * k + col];
      for (std::size_t j = 0; j < k; ++j) {
        a[r * k + j] = field_.sub(a[r * k + j], field_.mul(f, a[col * k + j]));
        inverse_[r * k + j] = field_.sub(inverse_[r * k + j], field_.mul(f, inverse_[col * k + j]));
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      Symbol acc = 0;
      for (std::size_t l = 0; l < k; ++l) acc = field_.add(acc, field_.mul(entries_[i * k + l], inverse_[l * k + j]));
      if (acc != (i == j ? 1 : 0)) throw Error(ErrorKind::SingularKernel, "inverse check failed");
    }
  }
}

KernelMatrix KernelMatrix::arikan(const PrimeField& field) {
  const long long e[] = {1, 1, 0, 1};
  return KernelMatrix(field, 2, e);
}

void KernelMatrix::apply_into(std::span<const Symbol> v, std::span<Symbol> out, bool inverse) const {
  if (v.size() != k_ || out.size() != k_)
    throw Error(ErrorKind::DimensionMismatch, "kernel of size " + std::to_string(k_) + " applied to vector of size " +
                                                  std::to_string(v.size()));
  const std::vector<Symbol>& mat = inverse ? inverse_ : entries_;
  const unsigned q = field_.modulus();
  for (std::size_t i = 0; i < k_; ++i) {
    unsigned acc = 0;
    for (std::size_t j = 0; j < k_; ++j) acc = (acc + unsigned{mat[i * k_ + j]} * v[j]) % q;
    out[i] = static_cast<Symbol>(acc);
  }
}

std::vector<Symbol> KernelMatrix::apply(std::span<const Symbol> v, bool inverse) const {
  std::vector<Symbol> out(k_);
  apply_into(v, out, inverse);
  return out;
}

}  // namespace phmm
