#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phmm/codec.hpp"

namespace phmm {

enum class Preset { TwoStateSticky, IidUniform, Deterministic, RandomStochastic };

Preset parse_preset(const std::string& name);
std::string_view preset_name(Preset preset);

// Sticky: each state keeps itself with probability 0.95 and emits
// (state mod q) with probability 0.95, spreading the rest uniformly.
// Deterministic: every state emits 0. Random presets draw positive entries
// from `seed` and obtain the stationary distribution by power iteration.
MarkovSource make_preset(Preset preset, unsigned q, std::size_t states, std::uint64_t seed);

// Dominant eigenvector of a column-stochastic matrix, normalized to sum 1.
std::vector<double> stationary_distribution(std::span<const double> transition, std::size_t states);

// Kernel from "arikan" or a text file holding k followed by k*k entries.
KernelMatrix load_kernel(const std::string& spec, const PrimeField& field);

enum class DecompressMode { Baseline, Fast, Both };

DecompressMode parse_mode(const std::string& name);

struct VerifyReport {
  std::size_t trials = 0;
  std::size_t exact = 0;
  // Per-trial round-trip success, in trial order.
  std::vector<bool> outcomes;
  // With DecompressMode::Both: trials on which the two decompressors disagreed.
  std::size_t disagreements = 0;
  std::size_t compressed_length = 0;
};

// Trial i samples a fresh block with seed + i, compresses, and decompresses.
VerifyReport run_verify(const MarkovSource& source, const AuxInfo& aux, std::size_t trials, std::uint64_t seed,
                        DecompressMode mode);

struct BenchConfig {
  std::vector<std::size_t> depths{5, 6, 7};
  std::size_t runs = 5;
  std::uint64_t seed = 1;
  Epsilon epsilon{1, 10};
  std::size_t preprocess_trials = 0;
  std::optional<double> threshold;
};

struct BenchRow {
  std::size_t depth = 0;
  std::size_t n = 0;
  double baseline_seconds = 0.0;  // median over runs
  double fast_seconds = 0.0;      // median over runs
  std::size_t compressed_length = 0;
  std::size_t successes = 0;
  std::size_t runs = 0;
  bool identical = true;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  // time(row i+1) / time(row i) for each consecutive pair.
  std::vector<double> baseline_ratios() const;
  std::vector<double> fast_ratios() const;
  void write(std::ostream& out) const;
};

// Times both decompressors on identical streams for every depth. Timing
// covers decompression only.
BenchReport run_bench(const MarkovSource& source, const KernelMatrix& kernel, const BenchConfig& config);

double median(std::vector<double> values);

// Entry point of the phmm tool. Returns the process exit code:
// 0 success, 1 usage or other error, 2 round-trip mismatch, 3 format error.
int run_cli(int argc, const char* const* argv);

}  // namespace phmm
