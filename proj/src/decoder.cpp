#include "phmm/decoder.hpp"

#include <algorithm>
#include <string>

namespace phmm {

namespace {

void normalize_into(std::span<const double> in, std::span<double> out) {
  double sum = 0.0;
  for (double w : in) sum += w;
  if (sum > 0.0) {
    for (std::size_t v = 0; v < in.size(); ++v) out[v] = in[v] / sum;
  } else {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
  }
}

Symbol argmax(std::span<const double> dist) {
  std::size_t best = 0;
  for (std::size_t v = 1; v < dist.size(); ++v)
    if (dist[v] > dist[best]) best = v;
  return static_cast<Symbol>(best);
}

}  // namespace

PriorProfile::PriorProfile(std::span<const SymbolDistribution> dists)
    : q_(dists.empty() ? 0 : static_cast<unsigned>(dists.front().probs.size())), m_(dists.size()) {
  probs_.reserve(m_ * q_);
  for (const auto& d : dists) {
    if (d.probs.size() != q_) throw Error(ErrorKind::DimensionMismatch, "prior distributions differ in alphabet size");
    probs_.insert(probs_.end(), d.probs.begin(), d.probs.end());
  }
}

void PriorProfile::set(std::size_t p, const SymbolDistribution& d) {
  if (d.probs.size() != q_) throw Error(ErrorKind::DimensionMismatch, "prior distribution has wrong alphabet size");
  std::copy(d.probs.begin(), d.probs.end(), probs_.begin() + static_cast<std::ptrdiff_t>(p * q_));
}

ScDecoder::ScDecoder(const TransformPlan& plan)
    : plan_(&plan), q_(plan.field().modulus()), k_(plan.arity()) {
  pow_q_.assign(k_ + 1, 1);
  for (std::size_t a = 1; a <= k_; ++a) pow_q_[a] = pow_q_[a - 1] * q_;
  tuples_ = pow_q_[k_];

  // Z-tuple = M^-1 * X-tuple at every node.
  image_.resize(tuples_ * k_);
  std::vector<Symbol> digits(k_), out(k_);
  for (std::size_t idx = 0; idx < tuples_; ++idx) {
    for (std::size_t a = 0; a < k_; ++a) digits[a] = static_cast<Symbol>((idx / pow_q_[a]) % q_);
    plan.kernel().apply_into(digits, out, /*inverse=*/true);
    std::copy(out.begin(), out.end(), image_.begin() + static_cast<std::ptrdiff_t>(idx * k_));
  }

  std::size_t size = plan.length();
  for (std::size_t d = 0; d < plan.depth(); ++d) {
    child_priors_.emplace_back((size / k_) * q_);
    child_x_.emplace_back(size);
    size /= k_;
  }
  acc_.resize(q_);
}

void ScDecoder::check(const PriorProfile& prior, std::size_t m) const {
  if (prior.size() != plan_->length() || m != plan_->length())
    throw Error(ErrorKind::DimensionMismatch, "decoder expects length " + std::to_string(plan_->length()));
  if (prior.alphabet() != q_) throw Error(ErrorKind::DimensionMismatch, "prior alphabet does not match the field");
}

void ScDecoder::leaf(std::span<const double> prior, Symbol given, std::size_t offset, std::span<Symbol> u_hat,
                     std::span<Symbol> x) {
  normalize_into(prior, acc_);
  Symbol choice;
  if (mode_ == Mode::Scan) {
    std::copy(acc_.begin(), acc_.end(), conditionals_->begin() + static_cast<std::ptrdiff_t>(offset * q_));
    choice = given;
  } else {
    choice = given != kUnspecified ? given : argmax(acc_);
  }
  u_hat[0] = choice;
  x[0] = choice;
}

void ScDecoder::node(std::size_t depth, std::span<const double> priors, std::span<const Symbol> u, std::size_t offset,
                     std::span<Symbol> u_hat, std::span<Symbol> x) {
  const std::size_t size = u.size();
  if (size == 1) {
    leaf(priors, u[0], offset, u_hat, x);
    return;
  }
  const std::size_t sub = size / k_;
  std::vector<double>& child = child_priors_[depth];
  std::vector<Symbol>& xs = child_x_[depth];

  for (std::size_t c = 0; c < k_; ++c) {
    // P(X_c[b] | X_0..X_{c-1}[b]) for every position b of the child.
    const std::size_t tails = pow_q_[k_ - c];
    for (std::size_t b = 0; b < sub; ++b) {
      std::size_t prefix = 0;
      for (std::size_t a = 0; a < c; ++a) prefix += xs[a * sub + b] * pow_q_[a];
      std::fill(acc_.begin(), acc_.end(), 0.0);
      for (std::size_t tail = 0; tail < tails; ++tail) {
        const Symbol* z = image_.data() + (prefix + tail * pow_q_[c]) * k_;
        double w = 1.0;
        for (std::size_t a = 0; a < k_; ++a) w *= priors[(a * sub + b) * q_ + z[a]];
        acc_[tail % q_] += w;
      }
      normalize_into(acc_, std::span<double>(child).subspan(b * q_, q_));
    }
    node(depth + 1, std::span<const double>(child).first(sub * q_), u.subspan(c * sub, sub), offset + c * sub,
         u_hat.subspan(c * sub, sub), std::span<Symbol>(xs).subspan(c * sub, sub));
  }

  for (std::size_t b = 0; b < sub; ++b) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < k_; ++c) idx += xs[c * sub + b] * pow_q_[c];
    const Symbol* z = image_.data() + idx * k_;
    for (std::size_t a = 0; a < k_; ++a) x[a * sub + b] = z[a];
  }
}

DecodeResult ScDecoder::decode(const PriorProfile& prior, const PartialVector& u) {
  check(prior, u.size());
  for (Symbol s : u.entries)
    if (s != kUnspecified && s >= q_) throw Error(ErrorKind::InvalidArgument, "specified symbol outside F_q");
  const std::size_t m = plan_->length();
  DecodeResult result{std::vector<Symbol>(m), std::vector<Symbol>(m)};
  mode_ = Mode::Decode;
  node(0, prior.flat(), u.entries, 0, result.u_hat, result.z_hat);
  return result;
}

std::vector<double> ScDecoder::scan(const PriorProfile& prior, std::span<const Symbol> z_true) {
  check(prior, z_true.size());
  const std::size_t m = plan_->length();
  const std::vector<Symbol> u_true = plan_->forward(z_true);
  std::vector<double> conditionals(m * q_);
  std::vector<Symbol> u_hat(m), x(m);
  mode_ = Mode::Scan;
  conditionals_ = &conditionals;
  node(0, prior.flat(), u_true, 0, u_hat, x);
  conditionals_ = nullptr;
  mode_ = Mode::Decode;
  return conditionals;
}

DecodeResult sc_decode(const TransformPlan& plan, const PriorProfile& prior, const PartialVector& u) {
  return ScDecoder(plan).decode(prior, u);
}

std::vector<SymbolDistribution> sc_scan(const TransformPlan& plan, const PriorProfile& prior,
                                        std::span<const Symbol> z_true) {
  const std::vector<double> flat = ScDecoder(plan).scan(prior, z_true);
  const unsigned q = plan.field().modulus();
  std::vector<SymbolDistribution> out(plan.length());
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p].probs.assign(flat.begin() + static_cast<std::ptrdiff_t>(p * q),
                        flat.begin() + static_cast<std::ptrdiff_t>((p + 1) * q));
  return out;
}

}  // namespace phmm
