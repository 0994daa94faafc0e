#include "phmm/codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace phmm {

Epsilon::Epsilon(std::uint32_t n, std::uint32_t d) : num(n), den(d) {
  if (d == 0 || n == 0 || n >= d)
    throw Error(ErrorKind::InvalidArgument, "epsilon must be a fraction strictly between 0 and 1");
}

Epsilon Epsilon::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw Error(ErrorKind::InvalidArgument, "epsilon must be written NUM/DEN");
  std::uint32_t n = 0, d = 0;
  const char* begin = text.data();
  const char* mid = begin + slash;
  const char* end = begin + text.size();
  auto r1 = std::from_chars(begin, mid, n);
  auto r2 = std::from_chars(mid + 1, end, d);
  if (r1.ec != std::errc() || r1.ptr != mid || r2.ec != std::errc() || r2.ptr != end)
    throw Error(ErrorKind::InvalidArgument, "cannot parse epsilon '" + text + "'");
  return Epsilon(n, d);
}

SourceMatrix SourceMatrix::reshape(std::span<const Symbol> sequence, std::size_t m) {
  if (sequence.size() != m * m)
    throw Error(ErrorKind::LengthMismatch,
                "sequence of length " + std::to_string(sequence.size()) + " is not " + std::to_string(m) + "^2");
  SourceMatrix z(m);
  std::copy(sequence.begin(), sequence.end(), z.data_.begin());
  return z;
}

std::vector<Symbol> SourceMatrix::row(std::size_t j) const {
  std::vector<Symbol> out(m_);
  for (std::size_t i = 0; i < m_; ++i) out[i] = at(j, i);
  return out;
}

void SourceMatrix::set_row(std::size_t j, std::span<const Symbol> values) {
  if (values.size() != m_) throw Error(ErrorKind::DimensionMismatch, "row has wrong length");
  for (std::size_t i = 0; i < m_; ++i) at(j, i) = values[i];
}

std::size_t AuxInfo::retained_symbols() const noexcept {
  std::size_t total = 0;
  for (const auto& s : row_sets) total += s.size();
  return total;
}

void AuxInfo::validate() const {
  const std::size_t side = m();
  if (row_sets.size() != side) throw Error(ErrorKind::FormatError, "aux needs one retained set per row");
  for (std::size_t j = 0; j < side; ++j) {
    const auto& s = row_sets[j];
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (s[p] >= side || (p > 0 && s[p] <= s[p - 1]))
        throw Error(ErrorKind::FormatError, "retained set of row " + std::to_string(j) + " is not ascending in [0, m)");
    }
    if (j >= decoded_rows() && s.size() != side)
      throw Error(ErrorKind::FormatError, "row " + std::to_string(j) + " past the decoded boundary must be stored whole");
  }
}

AuxInfo preprocess(const MarkovSource& source, const TransformPlan& plan, Epsilon epsilon,
                   const PreprocessOptions& options) {
  if (source.alphabet() != plan.field().modulus())
    throw Error(ErrorKind::DimensionMismatch, "source alphabet does not match the kernel field");
  const std::size_t m = plan.length();
  const std::size_t n = m * m;
  const unsigned q = source.alphabet();
  const std::size_t trials = options.trials ? options.trials : std::max<std::size_t>(200, 4 * m);
  const double threshold = options.threshold.value_or(epsilon.value() / (8.0 * static_cast<double>(n)));
  const std::size_t decoded = epsilon.decoded_rows(m);
  const double log_q = std::log(static_cast<double>(q));

  ScDecoder decoder(plan);
  std::vector<double> misses(decoded * m, 0.0);
  std::vector<BeliefState> beliefs(m);
  PriorProfile priors(q, m);
  double loss = 0.0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SourceMatrix z = SourceMatrix::reshape(sample(source, n, options.seed + trial).symbols, m);
    std::fill(beliefs.begin(), beliefs.end(), source.initial_belief());
    for (std::size_t j = 0; j < m; ++j) {
      const std::vector<Symbol> row = z.row(j);
      for (std::size_t i = 0; i < m; ++i) {
        const SymbolDistribution d = predictive(source, beliefs[i]);
        loss -= std::log(d.probs[row[i]]) / log_q;
        priors.set(i, d);
      }
      if (j < decoded) {
        const std::vector<double> cond = decoder.scan(priors, row);
        for (std::size_t p = 0; p < m; ++p) {
          const auto dist = std::span<const double>(cond).subspan(p * q, q);
          misses[j * m + p] += 1.0 - *std::max_element(dist.begin(), dist.end());
        }
      }
      for (std::size_t i = 0; i < m; ++i) beliefs[i] = belief_update(source, beliefs[i], row[i]);
    }
  }

  AuxInfo aux{plan, epsilon, std::vector<std::vector<std::uint32_t>>(m), 0.0};
  for (std::size_t j = 0; j < m; ++j) {
    auto& s = aux.row_sets[j];
    for (std::size_t p = 0; p < m; ++p) {
      const bool keep = j >= decoded || misses[j * m + p] / static_cast<double>(trials) > threshold;
      if (keep) s.push_back(static_cast<std::uint32_t>(p));
    }
  }
  aux.estimated_rate = loss / static_cast<double>(trials * n);
  return aux;
}

namespace {

void check_pipeline(const MarkovSource* source, const AuxInfo& aux) {
  if (source && source->alphabet() != aux.q())
    throw Error(ErrorKind::DimensionMismatch, "source alphabet does not match aux");
  if (aux.row_sets.size() != aux.m()) throw Error(ErrorKind::DimensionMismatch, "aux has wrong number of rows");
}

void check_stream(const AuxInfo& aux, const CompressedStream& stream) {
  if (stream.aux_digest != aux_digest(aux))
    throw Error(ErrorKind::DigestMismatch, "compressed stream was produced with different auxiliary information");
  if (stream.payload.size() != aux.retained_symbols())
    throw Error(ErrorKind::StreamCorrupt, "payload has " + std::to_string(stream.payload.size()) + " symbols, expected " +
                                              std::to_string(aux.retained_symbols()));
  for (Symbol s : stream.payload)
    if (s >= aux.q()) throw Error(ErrorKind::StreamCorrupt, "payload symbol outside F_q");
}

// U^j with the non-retained coordinates left unspecified.
PartialVector expand_row(const AuxInfo& aux, const CompressedStream& stream, std::size_t j, std::size_t& cursor) {
  PartialVector u = PartialVector::unspecified(aux.m());
  for (std::uint32_t p : aux.row_sets[j]) u.entries[p] = stream.payload[cursor++];
  return u;
}

template <typename PriorFn, typename RowFn>
SourceMatrix decompress_rows(const MarkovSource& source, const AuxInfo& aux, const CompressedStream& stream,
                             PriorFn&& prior_for, RowFn&& after_row) {
  check_pipeline(&source, aux);
  check_stream(aux, stream);
  const std::size_t m = aux.m();
  const std::size_t decoded = aux.decoded_rows();
  SourceMatrix z_hat(m);
  ScDecoder decoder(aux.plan);
  PriorProfile priors(aux.q(), m);
  std::size_t cursor = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const PartialVector u = expand_row(aux, stream, j, cursor);
    if (j < decoded) {
      for (std::size_t i = 0; i < m; ++i) priors.set(i, prior_for(z_hat, j, i));
      const DecodeResult r = decoder.decode(priors, u);
      z_hat.set_row(j, r.z_hat);
      after_row(z_hat, j);
    } else {
      z_hat.set_row(j, aux.plan.inverse(u.entries));
    }
  }
  return z_hat;
}

}  // namespace

CompressedStream compress(const AuxInfo& aux, const SourceMatrix& z) {
  check_pipeline(nullptr, aux);
  const std::size_t m = aux.m();
  if (z.side() != m) throw Error(ErrorKind::DimensionMismatch, "source matrix side does not match aux");
  CompressedStream out;
  out.aux_digest = aux_digest(aux);
  out.payload.reserve(aux.retained_symbols());
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Symbol> row = z.row(j);
    for (Symbol s : row)
      if (s >= aux.q()) throw Error(ErrorKind::InvalidArgument, "source symbol outside F_q");
    aux.plan.forward_in_place(row);
    for (std::uint32_t p : aux.row_sets[j]) out.payload.push_back(row[p]);
  }
  return out;
}

SourceMatrix baseline_decompress(const MarkovSource& source, const AuxInfo& aux, const CompressedStream& stream) {
  return decompress_rows(
      source, aux, stream,
      [&](const SourceMatrix& z_hat, std::size_t j, std::size_t i) {
        return forward_infer(source, j + 1, z_hat.column_prefix(i, j));
      },
      [](const SourceMatrix&, std::size_t) {});
}

SourceMatrix fast_decompress(const MarkovSource& source, const AuxInfo& aux, const CompressedStream& stream,
                             const BeliefObserver& observer) {
  std::vector<BeliefState> beliefs(aux.m(), source.initial_belief());
  return decompress_rows(
      source, aux, stream,
      [&](const SourceMatrix&, std::size_t, std::size_t i) { return predictive(source, beliefs[i]); },
      [&](const SourceMatrix& z_hat, std::size_t j) {
        for (std::size_t i = 0; i < beliefs.size(); ++i) beliefs[i] = belief_update(source, beliefs[i], z_hat.at(j, i));
        if (observer) observer(j, beliefs);
      });
}

}  // namespace phmm
