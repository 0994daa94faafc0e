#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "phmm/codec.hpp"

namespace phmm {

namespace {

constexpr char kAuxMagic[4] = {'P', 'H', 'M', 'M'};
constexpr char kStreamMagic[4] = {'P', 'H', 'M', 'C'};
constexpr std::uint8_t kVersion = 1;
// Keeps m*m bitmaps at a sane size.
constexpr std::size_t kMaxSide = std::size_t{1} << 14;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::span<const std::uint8_t> take(std::size_t count) {
    if (bytes_.size() - pos_ < count) throw Error(ErrorKind::FormatError, std::string(what_) + " is truncated");
    auto out = bytes_.subspan(pos_, count);
    pos_ += count;
    return out;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  void magic(const char (&expected)[4]) {
    auto b = take(4);
    if (std::memcmp(b.data(), expected, 4) != 0) throw Error(ErrorKind::FormatError, std::string(what_) + " has bad magic");
    if (u8() != kVersion) throw Error(ErrorKind::FormatError, std::string(what_) + " has unsupported version");
  }
  std::span<const std::uint8_t> rest() { return take(bytes_.size() - pos_); }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  const char* what_;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_aux(const AuxInfo& aux) {
  aux.validate();
  const std::size_t m = aux.m();
  const std::size_t k = aux.plan.arity();
  std::vector<std::uint8_t> out(std::begin(kAuxMagic), std::end(kAuxMagic));
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(aux.q()));
  out.push_back(static_cast<std::uint8_t>(k));
  out.push_back(static_cast<std::uint8_t>(aux.plan.depth()));
  put_u32(out, aux.epsilon.num);
  put_u32(out, aux.epsilon.den);
  for (Symbol e : aux.plan.kernel().entries()) out.push_back(e);
  const std::size_t row_bytes = (m + 7) / 8;
  for (const auto& s : aux.row_sets) {
    const std::size_t base = out.size();
    out.resize(base + row_bytes, 0);
    for (std::uint32_t p : s) out[base + p / 8] |= static_cast<std::uint8_t>(1u << (p % 8));
  }
  put_u64(out, std::bit_cast<std::uint64_t>(aux.estimated_rate));
  return out;
}

AuxInfo decode_aux(std::span<const std::uint8_t> bytes) {
  Reader in(bytes, "aux file");
  in.magic(kAuxMagic);
  const unsigned q = in.u8();
  const std::size_t k = in.u8();
  const std::size_t t = in.u8();
  const std::uint32_t num = in.u32();
  const std::uint32_t den = in.u32();
  if (k < 1) throw Error(ErrorKind::FormatError, "aux kernel size is zero");
  std::size_t m = 1;
  for (std::size_t d = 0; d < t; ++d) {
    m *= k;
    if (m > kMaxSide) throw Error(ErrorKind::FormatError, "aux block side is too large");
  }
  try {
    PrimeField field(q);
    std::vector<long long> entries;
    for (std::uint8_t e : in.take(k * k)) {
      if (e >= q) throw Error(ErrorKind::FormatError, "aux kernel entry outside F_q");
      entries.push_back(e);
    }
    AuxInfo aux{TransformPlan(KernelMatrix(field, k, entries), t), Epsilon(num, den), {}, 0.0};
    const std::size_t row_bytes = (m + 7) / 8;
    aux.row_sets.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      auto bits = in.take(row_bytes);
      for (std::size_t p = 0; p < m; ++p)
        if (bits[p / 8] & (1u << (p % 8))) aux.row_sets[j].push_back(static_cast<std::uint32_t>(p));
      for (std::size_t p = m; p < row_bytes * 8; ++p)
        if (bits[p / 8] & (1u << (p % 8))) throw Error(ErrorKind::FormatError, "aux bitmap padding is not zero");
    }
    aux.estimated_rate = std::bit_cast<double>(in.u64());
    if (!in.done()) throw Error(ErrorKind::FormatError, "aux file has trailing bytes");
    aux.validate();
    return aux;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw;
    throw Error(ErrorKind::FormatError, std::string("aux file: ") + e.what());
  }
}

std::uint64_t aux_digest(const AuxInfo& aux) { return fnv1a64(encode_aux(aux)); }

std::vector<std::uint8_t> encode_stream(const CompressedStream& stream) {
  std::vector<std::uint8_t> out(std::begin(kStreamMagic), std::end(kStreamMagic));
  out.push_back(kVersion);
  put_u64(out, stream.aux_digest);
  out.insert(out.end(), stream.payload.begin(), stream.payload.end());
  return out;
}

CompressedStream decode_stream(std::span<const std::uint8_t> bytes) {
  Reader in(bytes, "compressed file");
  in.magic(kStreamMagic);
  CompressedStream out;
  out.aux_digest = in.u64();
  auto payload = in.rest();
  out.payload.assign(payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FormatError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::FormatError, "short write to " + path.string());
}

}  // namespace phmm
