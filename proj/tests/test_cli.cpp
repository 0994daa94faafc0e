#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "phmm/cli.hpp"

using namespace phmm;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "phmm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str() + err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("phmm_cli_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("presets") {
  CHECK(parse_preset("two-state-sticky") == Preset::TwoStateSticky);
  CHECK(preset_name(Preset::RandomStochastic) == "random-stochastic");
  try {
    parse_preset("bogus");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPreset);
  }

  const MarkovSource sticky = make_preset(Preset::TwoStateSticky, 2, 2, 0);
  CHECK(sticky.states() == 2);
  const double h = entropy_rate_estimate(sticky, 4096, 10, 1);
  CHECK(h > 0.0);
  CHECK(h < 0.7);

  const MarkovSource det = make_preset(Preset::Deterministic, 5, 3, 0);
  CHECK(sample(det, 100, 3).symbols == std::vector<Symbol>(100, 0));
  CHECK(entropy_rate_estimate(det, 64, 4, 1) == 0.0);

  const MarkovSource iid = make_preset(Preset::IidUniform, 3, 1, 0);
  CHECK(entropy_rate_estimate(iid, 4096, 4, 1) == doctest::Approx(1.0).epsilon(0.01));

  const MarkovSource r = make_preset(Preset::RandomStochastic, 3, 4, 7);
  CHECK(r == make_preset(Preset::RandomStochastic, 3, 4, 7));
  CHECK_FALSE(r == make_preset(Preset::RandomStochastic, 3, 4, 8));
}

TEST_CASE("stationary distribution by power iteration") {
  // Pi = [[0.9, 0.2], [0.1, 0.8]] has stationary (2/3, 1/3)
  const double pi[] = {0.9, 0.2, 0.1, 0.8};
  const auto s = stationary_distribution(pi, 2);
  CHECK(s[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(s[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("kernel loading") {
  const PrimeField f(3);
  CHECK(load_kernel("arikan", f) == KernelMatrix::arikan(f));
  TempDir dir;
  {
    std::ofstream(dir / "k3") << "3\n1 1 0\n0 1 1\n0 0 1\n";
    std::ofstream(dir / "bad") << "2\n1 1\n1\n";
  }
  const KernelMatrix k = load_kernel(dir / "k3", f);
  CHECK(k.size() == 3);
  CHECK(k.at(0, 1) == 1);
  CHECK(k.at(1, 0) == 0);
  CHECK_THROWS_AS(load_kernel(dir / "bad", f), Error);
  CHECK_THROWS_AS(load_kernel(dir / "missing", f), Error);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("verify reports") {
  SUBCASE("deterministic source round-trips every trial") {
    const MarkovSource src = make_preset(Preset::Deterministic, 2, 2, 0);
    const AuxInfo aux = preprocess(src, TransformPlan(KernelMatrix::arikan(PrimeField(2)), 4), Epsilon(1, 10));
    const VerifyReport r = run_verify(src, aux, 100, 1, DecompressMode::Both);
    CHECK(r.exact == 100);
    CHECK(r.disagreements == 0);
  }
  SUBCASE("same seeds give the same per-trial outcomes in both modes") {
    const MarkovSource src = make_preset(Preset::TwoStateSticky, 2, 2, 0);
    const AuxInfo aux = preprocess(src, TransformPlan(KernelMatrix::arikan(PrimeField(2)), 5), Epsilon(1, 10),
                                   {.trials = 64, .threshold = 0.02, .seed = 3});
    const VerifyReport f = run_verify(src, aux, 50, 100, DecompressMode::Fast);
    const VerifyReport b = run_verify(src, aux, 50, 100, DecompressMode::Baseline);
    const VerifyReport both = run_verify(src, aux, 50, 100, DecompressMode::Both);
    CHECK(f.outcomes == b.outcomes);
    CHECK(both.outcomes == f.outcomes);
    CHECK(both.disagreements == 0);
    CHECK(f.exact < 50);  // the loose threshold has to cost something
  }
  SUBCASE("iid uniform source does not compress") {
    const MarkovSource src = make_preset(Preset::IidUniform, 2, 1, 0);
    const AuxInfo aux = preprocess(src, TransformPlan(KernelMatrix::arikan(PrimeField(2)), 5), Epsilon(1, 10));
    const VerifyReport r = run_verify(src, aux, 5, 1, DecompressMode::Fast);
    CHECK(static_cast<double>(r.compressed_length) >= 0.98 * static_cast<double>(aux.n()));
    CHECK(r.exact == 5);
  }
  CHECK(parse_mode("both") == DecompressMode::Both);
  CHECK_THROWS_AS(parse_mode("slow"), Error);
}

TEST_CASE("bench reports identical output and ratios") {
  const MarkovSource src = make_preset(Preset::TwoStateSticky, 2, 2, 0);
  BenchConfig cfg;
  cfg.depths = {3, 4};
  cfg.runs = 5;
  cfg.preprocess_trials = 32;
  const BenchReport r = run_bench(src, KernelMatrix::arikan(PrimeField(2)), cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].n == 64);
  CHECK(r.rows[1].n == 256);
  CHECK(r.rows[0].identical);
  CHECK(r.rows[1].identical);
  CHECK(r.rows[1].runs == 5);
  CHECK(r.baseline_ratios().size() == 1);
  CHECK(r.fast_ratios()[0] > 0.0);
  std::ostringstream out;
  r.write(out);
  CHECK(out.str().rfind("t,n,baseline_s,fast_s", 0) == 0);
  CHECK(out.str().find("ratio from_n=64 to_n=256") != std::string::npos);
}

TEST_CASE("file pipeline through the command line") {
  TempDir dir;
  const auto src = dir / "src.json", aux = dir / "aux.bin", in = dir / "z.bin", c = dir / "z.phc",
             back = dir / "back.bin", back2 = dir / "back2.bin";

  REQUIRE(cli({"gen-source", "--preset", "two-state-sticky", "-o", src}).code == 0);
  REQUIRE(cli({"--t", "4", "--trials", "64", "preprocess", "--source", src, "-o", aux}).code == 0);
  REQUIRE(cli({"--t", "4", "--seed", "9", "sample", "--source", src, "-o", in}).code == 0);
  CHECK(read_file(in).size() == 256);
  const auto comp = cli({"compress", "--aux", aux, "-i", in, "-o", c});
  REQUIRE(comp.code == 0);
  CHECK(comp.out.find("compress n=256") != std::string::npos);
  REQUIRE(cli({"decompress", "--source", src, "--aux", aux, "-i", c, "-o", back, "--mode", "fast"}).code == 0);
  REQUIRE(cli({"decompress", "--source", src, "--aux", aux, "-i", c, "-o", back2, "--mode", "baseline"}).code == 0);
  CHECK(read_file(back) == read_file(back2));

  const auto v = cli({"--trials", "20", "verify", "--source", src, "--aux", aux, "--mode", "both"});
  CHECK((v.code == 0 || v.code == 2));
  CHECK(v.out.find("disagreements=0") != std::string::npos);

  SUBCASE("deterministic verify exits 0") {
    REQUIRE(cli({"gen-source", "--preset", "deterministic", "-o", src}).code == 0);
    REQUIRE(cli({"--t", "3", "preprocess", "--source", src, "-o", aux}).code == 0);
    const auto r = cli({"verify", "--source", src, "--aux", aux});
    CHECK(r.code == 0);
    CHECK(r.out.find("exact=100") != std::string::npos);
  }
  SUBCASE("corrupt inputs exit 3") {
    auto bytes = read_file(c);
    bytes.pop_back();
    write_file(dir / "short.phc", bytes);
    CHECK(cli({"decompress", "--source", src, "--aux", aux, "-i", dir / "short.phc", "-o", back}).code == 3);
    bytes = read_file(aux);
    bytes[0] = 'Q';
    write_file(dir / "bad.aux", bytes);
    CHECK(cli({"compress", "--aux", dir / "bad.aux", "-i", in, "-o", c}).code == 3);
    write_file(dir / "short.bin", std::vector<std::uint8_t>(255, 0));
    CHECK(cli({"compress", "--aux", aux, "-i", dir / "short.bin", "-o", c}).code == 3);
    // stream built against a different aux file
    REQUIRE(cli({"--t", "4", "--trials", "16", "--seed", "2", "preprocess", "--source", src, "-o", dir / "aux2.bin"})
                .code == 0);
    CHECK(cli({"decompress", "--source", src, "--aux", dir / "aux2.bin", "-i", c, "-o", back}).code == 3);
  }
  SUBCASE("usage errors exit 1") {
    CHECK(cli({"gen-source", "--preset", "nope", "-o", src}).code == 1);
    CHECK(cli({"--q", "4", "gen-source", "-o", src}).code == 1);
    CHECK(cli({"--epsilon", "3/2", "gen-source", "-o", src}).code == 1);
    CHECK(cli({"bogus-command"}).code == 1);
    CHECK(cli({}).code == 1);
  }
}
