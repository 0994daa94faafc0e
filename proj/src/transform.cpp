#include "phmm/transform.hpp"

#include <string>

namespace phmm {

TransformPlan::TransformPlan(KernelMatrix kernel, std::size_t depth)
    : kernel_(std::move(kernel)), depth_(depth), length_(1) {
  for (std::size_t d = 0; d < depth_; ++d) {
    if (length_ > (std::size_t{1} << 40) / kernel_.size())
      throw Error(ErrorKind::InvalidArgument, "transform length k^t too large");
    length_ *= kernel_.size();
  }
}

void TransformPlan::butterfly(std::span<Symbol> data, bool inverse) const {
  if (data.size() != length_)
    throw Error(ErrorKind::DimensionMismatch,
                "expected length " + std::to_string(length_) + ", got " + std::to_string(data.size()));
  const std::size_t k = kernel_.size();
  std::vector<Symbol> in(k), out(k);
  // Apply the kernel along one base-k digit at a time.
  for (std::size_t stride = 1; stride < length_; stride *= k) {
    const std::size_t block = stride * k;
    for (std::size_t base = 0; base < length_; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t c = 0; c < k; ++c) in[c] = data[base + off + c * stride];
        kernel_.apply_into(in, out, inverse);
        for (std::size_t c = 0; c < k; ++c) data[base + off + c * stride] = out[c];
      }
    }
  }
}

void TransformPlan::forward_in_place(std::span<Symbol> data) const { butterfly(data, false); }

void TransformPlan::inverse_in_place(std::span<Symbol> data) const {
  for (Symbol s : data)
    if (s == kUnspecified) throw Error(ErrorKind::UnspecifiedSymbol, "cannot invert a vector with unspecified entries");
  butterfly(data, true);
}

std::vector<Symbol> TransformPlan::forward(std::span<const Symbol> z) const {
  std::vector<Symbol> out(z.begin(), z.end());
  forward_in_place(out);
  return out;
}

std::vector<Symbol> TransformPlan::inverse(std::span<const Symbol> u) const {
  std::vector<Symbol> out(u.begin(), u.end());
  inverse_in_place(out);
  return out;
}

}  // namespace phmm
