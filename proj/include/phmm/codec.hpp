#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phmm/decoder.hpp"
#include "phmm/hmm.hpp"
#include "phmm/transform.hpp"

namespace phmm {

// Exact rational in (0, 1).
struct Epsilon {
  std::uint32_t num = 1;
  std::uint32_t den = 10;

  Epsilon() = default;
  Epsilon(std::uint32_t n, std::uint32_t d);

  // Parses "NUM/DEN".
  static Epsilon parse(const std::string& text);

  double value() const noexcept { return static_cast<double>(num) / den; }
  // floor((1 - eps) * m): rows 0 .. decoded_rows(m)-1 are decoded, the rest are stored whole.
  std::size_t decoded_rows(std::size_t m) const noexcept {
    return static_cast<std::size_t>((static_cast<std::uint64_t>(den - num) * m) / den);
  }

  friend bool operator==(const Epsilon&, const Epsilon&) = default;
};

// m x m block of source symbols. Column i holds samples i*m .. i*m+m-1 of
// the flat sequence; row j collects the j-th sample of every column.
class SourceMatrix {
 public:
  explicit SourceMatrix(std::size_t m) : m_(m), data_(m * m, 0) {}

  // Throws LengthMismatch unless |sequence| == m*m.
  static SourceMatrix reshape(std::span<const Symbol> sequence, std::size_t m);

  std::size_t side() const noexcept { return m_; }
  Symbol at(std::size_t row, std::size_t col) const noexcept { return data_[col * m_ + row]; }
  Symbol& at(std::size_t row, std::size_t col) noexcept { return data_[col * m_ + row]; }

  std::vector<Symbol> row(std::size_t j) const;
  void set_row(std::size_t j, std::span<const Symbol> values);
  // Rows 0..rows-1 of column i, i.e. the within-column prefix.
  std::span<const Symbol> column_prefix(std::size_t col, std::size_t rows) const noexcept {
    return {data_.data() + col * m_, rows};
  }

  const std::vector<Symbol>& flatten() const noexcept { return data_; }

  friend bool operator==(const SourceMatrix&, const SourceMatrix&) = default;

 private:
  std::size_t m_;
  std::vector<Symbol> data_;
};

inline SourceMatrix reshape(std::span<const Symbol> sequence, std::size_t m) {
  return SourceMatrix::reshape(sequence, m);
}
inline std::vector<Symbol> flatten(const SourceMatrix& z) { return z.flatten(); }

// Output of preprocessing, shared by compressor and decompressors.
struct AuxInfo {
  TransformPlan plan;
  Epsilon epsilon;
  // Retained positions S_j of each transformed row, ascending.
  std::vector<std::vector<std::uint32_t>> row_sets;
  // Empirical entropy of the column-restarted source model, q-ary symbols per source symbol.
  double estimated_rate = 0.0;

  unsigned q() const noexcept { return plan.field().modulus(); }
  std::size_t m() const noexcept { return plan.length(); }
  std::size_t n() const noexcept { return m() * m(); }
  std::size_t decoded_rows() const noexcept { return epsilon.decoded_rows(m()); }
  std::size_t retained_symbols() const noexcept;

  // Throws FormatError if the row sets are malformed or rows past the
  // decoded boundary are not fully retained.
  void validate() const;
};

struct CompressedStream {
  std::uint64_t aux_digest = 0;
  std::vector<Symbol> payload;

  friend bool operator==(const CompressedStream&, const CompressedStream&) = default;
};

struct PreprocessOptions {
  std::size_t trials = 0;            // 0 selects max(200, 4m)
  std::optional<double> threshold;  // empty selects eps / (8n)
  std::uint64_t seed = 1;
};

// Monte-Carlo frozen-set construction. For each sampled block the decoded
// rows are scanned with the genie-aided decoder under the true per-column
// predictive priors, and the empirical rate at which the argmax of each
// conditional misses the true transformed symbol is accumulated. Positions
// whose miss rate exceeds the threshold are retained.
AuxInfo preprocess(const MarkovSource& source, const TransformPlan& plan, Epsilon epsilon,
                   const PreprocessOptions& options = {});

// Linear map Z -> (U^j restricted to S_j)_j, U^j = M^{(x)t} Z^j.
CompressedStream compress(const AuxInfo& aux, const SourceMatrix& z);

// Called after each decoded row with the per-column beliefs conditioned on rows 0..row.
using BeliefObserver = std::function<void(std::size_t row, std::span<const BeliefState> beliefs)>;

// Recomputes every column's prior from scratch with forward_infer on the
// decoded prefix. Quadratic in m per column; kept that way on purpose.
SourceMatrix baseline_decompress(const MarkovSource& source, const AuxInfo& aux, const CompressedStream& stream);

// Keeps one belief per column and advances it by one update per row.
// Produces output identical to baseline_decompress.
SourceMatrix fast_decompress(const MarkovSource& source, const AuxInfo& aux, const CompressedStream& stream,
                             const BeliefObserver& observer = {});

// --- File formats -------------------------------------------------------

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> encode_aux(const AuxInfo& aux);
AuxInfo decode_aux(std::span<const std::uint8_t> bytes);
// Digest of the encoded aux file, as stored in compressed streams.
std::uint64_t aux_digest(const AuxInfo& aux);

std::vector<std::uint8_t> encode_stream(const CompressedStream& stream);
CompressedStream decode_stream(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace phmm
