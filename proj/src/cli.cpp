#include "phmm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

namespace phmm {

namespace {

constexpr double kStay = 0.95;
constexpr double kEmit = 0.95;

std::vector<double> uniform(std::size_t count) { return std::vector<double>(count, 1.0 / static_cast<double>(count)); }

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "two-state-sticky") return Preset::TwoStateSticky;
  if (name == "iid-uniform") return Preset::IidUniform;
  if (name == "deterministic") return Preset::Deterministic;
  if (name == "random-stochastic") return Preset::RandomStochastic;
  throw Error(ErrorKind::InvalidPreset, "unknown preset '" + name + "'");
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::TwoStateSticky: return "two-state-sticky";
    case Preset::IidUniform: return "iid-uniform";
    case Preset::Deterministic: return "deterministic";
    case Preset::RandomStochastic: return "random-stochastic";
  }
  return "?";
}

std::vector<double> stationary_distribution(std::span<const double> transition, std::size_t states) {
  std::vector<double> v = uniform(states), next(states);
  for (int iter = 0; iter < 100000; ++iter) {
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < states; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < states; ++j) acc += transition[i * states + j] * v[j];
      next[i] = acc;
      sum += acc;
    }
    for (std::size_t i = 0; i < states; ++i) {
      next[i] /= sum;
      diff = std::max(diff, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    if (diff < 1e-15) break;
  }
  return v;
}

MarkovSource make_preset(Preset preset, unsigned q, std::size_t states, std::uint64_t seed) {
  PrimeField field(q);
  if (states == 0) throw Error(ErrorKind::InvalidArgument, "preset needs at least one state");
  const std::size_t l = states;
  std::vector<double> transition(l * l, 0.0), outputs(l * q, 0.0);

  switch (preset) {
    case Preset::TwoStateSticky:
      for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
          transition[i * l + j] = l == 1 ? 1.0 : (i == j ? kStay : (1.0 - kStay) / static_cast<double>(l - 1));
      for (std::size_t s = 0; s < l; ++s)
        for (unsigned y = 0; y < q; ++y)
          outputs[s * q + y] = y == s % q ? kEmit : (1.0 - kEmit) / static_cast<double>(q - 1);
      return MarkovSource(q, uniform(l), std::move(transition), std::move(outputs));

    case Preset::IidUniform:
      std::fill(transition.begin(), transition.end(), 1.0 / static_cast<double>(l));
      std::fill(outputs.begin(), outputs.end(), 1.0 / static_cast<double>(q));
      return MarkovSource(q, uniform(l), std::move(transition), std::move(outputs));

    case Preset::Deterministic:
      for (std::size_t j = 0; j < l; ++j) transition[((j + 1) % l) * l + j] = 1.0;
      for (std::size_t s = 0; s < l; ++s) outputs[s * q] = 1.0;
      return MarkovSource(q, uniform(l), std::move(transition), std::move(outputs));

    case Preset::RandomStochastic: {
      std::mt19937_64 rng(seed);
      for (std::size_t j = 0; j < l; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < l; ++i) sum += transition[i * l + j] = 0.05 + unit_uniform(rng());
        for (std::size_t i = 0; i < l; ++i) transition[i * l + j] /= sum;
      }
      for (std::size_t s = 0; s < l; ++s) {
        double sum = 0.0;
        for (unsigned y = 0; y < q; ++y) sum += outputs[s * q + y] = 0.05 + unit_uniform(rng());
        for (unsigned y = 0; y < q; ++y) outputs[s * q + y] /= sum;
      }
      std::vector<double> pi = stationary_distribution(transition, l);
      return MarkovSource(q, std::move(pi), std::move(transition), std::move(outputs));
    }
  }
  throw Error(ErrorKind::InvalidPreset, "unknown preset");
}

KernelMatrix load_kernel(const std::string& spec, const PrimeField& field) {
  if (spec == "arikan") return KernelMatrix::arikan(field);
  std::ifstream in(spec);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open kernel file " + spec);
  std::size_t k = 0;
  if (!(in >> k) || k == 0 || k > 8) throw Error(ErrorKind::FormatError, "kernel file must start with a size in [1, 8]");
  std::vector<long long> entries(k * k);
  for (auto& e : entries)
    if (!(in >> e)) throw Error(ErrorKind::FormatError, "kernel file has fewer than k*k entries");
  return KernelMatrix(field, k, entries);
}

DecompressMode parse_mode(const std::string& name) {
  if (name == "baseline") return DecompressMode::Baseline;
  if (name == "fast") return DecompressMode::Fast;
  if (name == "both") return DecompressMode::Both;
  throw Error(ErrorKind::InvalidArgument, "mode must be baseline, fast or both");
}

VerifyReport run_verify(const MarkovSource& source, const AuxInfo& aux, std::size_t trials, std::uint64_t seed,
                        DecompressMode mode) {
  VerifyReport report;
  report.trials = trials;
  report.compressed_length = aux.retained_symbols();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SourceMatrix z = SourceMatrix::reshape(sample(source, aux.n(), seed + trial).symbols, aux.m());
    const CompressedStream stream = compress(aux, z);
    bool ok = false;
    switch (mode) {
      case DecompressMode::Baseline: ok = baseline_decompress(source, aux, stream) == z; break;
      case DecompressMode::Fast: ok = fast_decompress(source, aux, stream) == z; break;
      case DecompressMode::Both: {
        const SourceMatrix a = baseline_decompress(source, aux, stream);
        const SourceMatrix b = fast_decompress(source, aux, stream);
        if (!(a == b)) ++report.disagreements;
        ok = b == z;
        break;
      }
    }
    report.outcomes.push_back(ok);
    report.exact += ok ? 1 : 0;
  }
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

template <typename F>
double seconds_of(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> ratios(const std::vector<BenchRow>& rows, double BenchRow::*field) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(rows[i].*field / rows[i - 1].*field);
  return out;
}

}  // namespace

std::vector<double> BenchReport::baseline_ratios() const { return ratios(rows, &BenchRow::baseline_seconds); }
std::vector<double> BenchReport::fast_ratios() const { return ratios(rows, &BenchRow::fast_seconds); }

void BenchReport::write(std::ostream& out) const {
  out << "t,n,baseline_s,fast_s,compressed,successes,runs,identical\n";
  for (const auto& r : rows) {
    out << r.depth << ',' << r.n << ',' << std::setprecision(6) << r.baseline_seconds << ',' << r.fast_seconds << ','
        << r.compressed_length << ',' << r.successes << ',' << r.runs << ',' << (r.identical ? "yes" : "no") << '\n';
  }
  const auto base = baseline_ratios();
  const auto fast = fast_ratios();
  for (std::size_t i = 0; i < base.size(); ++i) {
    out << "ratio from_n=" << rows[i].n << " to_n=" << rows[i + 1].n << " baseline=" << std::setprecision(4) << base[i]
        << " fast=" << fast[i] << '\n';
  }
}

BenchReport run_bench(const MarkovSource& source, const KernelMatrix& kernel, const BenchConfig& config) {
  std::vector<std::size_t> depths = config.depths;
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  const std::size_t runs = std::max<std::size_t>(config.runs, 5);

  BenchReport report;
  for (std::size_t t : depths) {
    const TransformPlan plan(kernel, t);
    PreprocessOptions options{config.preprocess_trials, config.threshold, config.seed};
    const AuxInfo aux = preprocess(source, plan, config.epsilon, options);

    BenchRow row;
    row.depth = t;
    row.n = aux.n();
    row.runs = runs;
    row.compressed_length = aux.retained_symbols();
    std::vector<double> base_times, fast_times;
    for (std::size_t r = 0; r < runs; ++r) {
      const SourceMatrix z = SourceMatrix::reshape(sample(source, aux.n(), config.seed + 1000003 + r).symbols, aux.m());
      const CompressedStream stream = compress(aux, z);
      std::optional<SourceMatrix> a, b;
      base_times.push_back(seconds_of([&] { a = baseline_decompress(source, aux, stream); }));
      fast_times.push_back(seconds_of([&] { b = fast_decompress(source, aux, stream); }));
      row.identical = row.identical && *a == *b;
      row.successes += *b == z ? 1 : 0;
    }
    row.baseline_seconds = median(base_times);
    row.fast_seconds = median(fast_times);
    report.rows.push_back(row);
  }
  return report;
}

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::FormatError:
    case ErrorKind::DigestMismatch:
    case ErrorKind::StreamCorrupt:
    case ErrorKind::LengthMismatch: return 3;
    default: return 1;
  }
}

std::vector<std::size_t> parse_depths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoul(item)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad depth list '" + text + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty depth list");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Polar compression for hidden Markov sources over prime fields"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  unsigned q = 2;
  std::string kernel_spec = "arikan";
  std::size_t depth = 5;
  std::string epsilon_text = "1/10";
  std::size_t trials = 0;
  std::optional<double> threshold;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--q", q, "Field modulus (prime)")->capture_default_str();
  app.add_option("--kernel", kernel_spec, "Kernel: 'arikan' or a kernel file")->capture_default_str();
  app.add_option("--t", depth, "Transform depth; m = k^t, n = m^2")->capture_default_str();
  app.add_option("--epsilon", epsilon_text, "Epsilon as NUM/DEN")->capture_default_str();
  app.add_option("--trials", trials, "Trials (0 selects the command's default)");
  app.add_option("--threshold", threshold, "Frozen-set miss-rate threshold (default epsilon/(8n))");

  std::string preset_text = "two-state-sticky", out_path, source_path, aux_path, in_path, mode_text = "fast";
  std::size_t states = 0, count = 0, runs = 5;
  std::string depth_list = "5,6,7";

  auto* gen = app.add_subcommand("gen-source", "Write a source specification from a preset")->fallthrough();
  gen->add_option("--preset", preset_text, "two-state-sticky | iid-uniform | deterministic | random-stochastic")
      ->capture_default_str();
  gen->add_option("--states", states, "Hidden state count (preset default when 0)");
  gen->add_option("-o,--output", out_path, "Output file")->required();

  auto* samp = app.add_subcommand("sample", "Draw a symbol sequence (one byte per symbol)")->fallthrough();
  samp->add_option("--source", source_path)->required();
  samp->add_option("--n", count, "Length (default k^(2t) for the Arikan kernel depth --t)");
  samp->add_option("-o,--output", out_path)->required();

  auto* pre = app.add_subcommand("preprocess", "Build auxiliary information")->fallthrough();
  pre->add_option("--source", source_path)->required();
  pre->add_option("-o,--output", out_path)->required();

  auto* comp = app.add_subcommand("compress", "Compress a sample file")->fallthrough();
  comp->add_option("--aux", aux_path)->required();
  comp->add_option("-i,--input", in_path)->required();
  comp->add_option("-o,--output", out_path)->required();

  auto* decomp = app.add_subcommand("decompress", "Decompress a compressed file")->fallthrough();
  decomp->add_option("--source", source_path)->required();
  decomp->add_option("--aux", aux_path)->required();
  decomp->add_option("-i,--input", in_path)->required();
  decomp->add_option("-o,--output", out_path)->required();
  decomp->add_option("--mode", mode_text, "baseline | fast")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Round-trip fresh samples and report failures")->fallthrough();
  ver->add_option("--source", source_path)->required();
  ver->add_option("--aux", aux_path)->required();
  ver->add_option("--mode", mode_text, "baseline | fast | both")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time both decompressors across depths")->fallthrough();
  bench->add_option("--depths", depth_list, "Comma-separated t values")->capture_default_str();
  bench->add_option("--runs", runs, "Timed runs per depth (at least 5)")->capture_default_str();
  bench->add_option("--source", source_path, "Source file (default: sticky preset)");
  bench->add_option("--states", states, "States of the default sticky source");
  bench->add_option("--preprocess-trials", count, "Preprocessing trials (0 selects the default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const Epsilon epsilon = Epsilon::parse(epsilon_text);

    if (*gen) {
      const Preset preset = parse_preset(preset_text);
      std::size_t l = states;
      if (l == 0) l = preset == Preset::TwoStateSticky ? 2 : preset == Preset::RandomStochastic ? 3 : 1;
      const MarkovSource source = make_preset(preset, q, l, seed);
      save_source(source, out_path);
      std::cout << "gen-source preset=" << preset_name(preset) << " q=" << q << " states=" << l << " output=" << out_path
                << '\n';
      return 0;
    }

    if (*samp) {
      const MarkovSource source = load_source(source_path);
      std::size_t n = count;
      if (n == 0) n = std::size_t{1} << (2 * depth);
      const SourceSample s = sample(source, n, seed);
      write_file(out_path, s.symbols);
      std::cout << "sample n=" << n << " seed=" << seed << " output=" << out_path << '\n';
      return 0;
    }

    if (*pre) {
      const MarkovSource source = load_source(source_path);
      const PrimeField field(source.alphabet());
      const TransformPlan plan(load_kernel(kernel_spec, field), depth);
      const auto start = std::chrono::steady_clock::now();
      const AuxInfo aux = preprocess(source, plan, epsilon, PreprocessOptions{trials, threshold, seed});
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_file(out_path, encode_aux(aux));
      std::cout << "preprocess q=" << aux.q() << " k=" << plan.arity() << " t=" << depth << " m=" << aux.m()
                << " n=" << aux.n() << " retained=" << aux.retained_symbols()
                << " rate=" << static_cast<double>(aux.retained_symbols()) / static_cast<double>(aux.n())
                << " estimated_rate=" << aux.estimated_rate << " seconds=" << secs << '\n';
      return 0;
    }

    if (*comp) {
      const AuxInfo aux = decode_aux(read_file(aux_path));
      const std::vector<std::uint8_t> input = read_file(in_path);
      const CompressedStream stream = compress(aux, SourceMatrix::reshape(input, aux.m()));
      write_file(out_path, encode_stream(stream));
      std::cout << "compress n=" << aux.n() << " compressed=" << stream.payload.size()
                << " rate=" << static_cast<double>(stream.payload.size()) / static_cast<double>(aux.n()) << " digest=0x"
                << std::hex << stream.aux_digest << std::dec << '\n';
      return 0;
    }

    if (*decomp) {
      const MarkovSource source = load_source(source_path);
      const AuxInfo aux = decode_aux(read_file(aux_path));
      const CompressedStream stream = decode_stream(read_file(in_path));
      const DecompressMode mode = parse_mode(mode_text);
      if (mode == DecompressMode::Both) throw Error(ErrorKind::InvalidArgument, "decompress takes baseline or fast");
      std::optional<SourceMatrix> z;
      const double secs = seconds_of([&] {
        z = mode == DecompressMode::Fast ? fast_decompress(source, aux, stream) : baseline_decompress(source, aux, stream);
      });
      write_file(out_path, z->flatten());
      std::cout << "decompress mode=" << mode_text << " n=" << aux.n() << " compressed=" << stream.payload.size()
                << " seconds=" << secs << '\n';
      return 0;
    }

    if (*ver) {
      const MarkovSource source = load_source(source_path);
      const AuxInfo aux = decode_aux(read_file(aux_path));
      const DecompressMode mode = parse_mode(mode_text);
      const VerifyReport r = run_verify(source, aux, trials ? trials : 100, seed, mode);
      std::cout << "verify mode=" << mode_text << " n=" << aux.n() << " compressed=" << r.compressed_length
                << " trials=" << r.trials << " exact=" << r.exact << " failures=" << r.trials - r.exact
                << " failure_rate=" << static_cast<double>(r.trials - r.exact) / static_cast<double>(r.trials)
                << " disagreements=" << r.disagreements << '\n';
      return (r.exact == r.trials && r.disagreements == 0) ? 0 : 2;
    }

    if (*bench) {
      const MarkovSource source = source_path.empty()
                                      ? make_preset(Preset::TwoStateSticky, q, states ? states : 2, seed)
                                      : load_source(source_path);
      const PrimeField field(source.alphabet());
      BenchConfig config;
      config.depths = parse_depths(depth_list);
      config.runs = trials ? trials : runs;
      config.seed = seed;
      config.epsilon = epsilon;
      config.preprocess_trials = count;
      config.threshold = threshold;
      const BenchReport report = run_bench(source, load_kernel(kernel_spec, field), config);
      report.write(std::cout);
      bool identical = true;
      for (const auto& r : report.rows) identical = identical && r.identical;
      std::cout << "bench states=" << source.states() << " identical=" << (identical ? "yes" : "no") << '\n';
      return identical ? 0 : 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace phmm
