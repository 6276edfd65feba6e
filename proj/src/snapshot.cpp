#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "swflow/flow.hpp"

namespace swflow {

namespace {

constexpr unsigned char kMagic[4] = {'S', 'W', 'F', 'L'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8 + 8 + 8 + 4;

class Writer {
 public:
  explicit Writer(std::vector<unsigned char>& out) : out_(out) {}
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }

 private:
  std::vector<unsigned char>& out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& in) : in_(in) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw FormatError("snapshot truncated");
  }
  const std::vector<unsigned char>& in_;
  std::size_t pos_ = 4;
};

}  // namespace

std::vector<unsigned char> encode_snapshot(const FlowState& state, const ModelParams& params) {
  require_same_lattice(state.phi.lattice(), state.a.lattice(), "write_snapshot");
  const Lattice& lat = state.phi.lattice();
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.reserve(kHeaderBytes + state.phi.values().size() * 16 + state.a.values().size() * 8);
  Writer w(out);
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(lat.dim()));
  w.u32(static_cast<std::uint32_t>(lat.extent()));
  w.f64(lat.length());
  w.f64(state.t);
  w.f64(params.S);
  w.u32(static_cast<std::uint32_t>(state.phi.fiber()));
  for (const auto& z : state.phi.values()) {
    w.f64(z.real());
    w.f64(z.imag());
  }
  for (double v : state.a.values()) w.f64(v);
  return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("snapshot truncated: header incomplete");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad snapshot magic");
  Reader r(bytes);
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));
  const std::uint32_t m = r.u32();
  const std::uint32_t n = r.u32();
  const double L = r.f64();
  const double t = r.f64();
  const double S = r.f64();
  const std::uint32_t N = r.u32();
  if (m < kMinDim || m > kMaxDim || n < 4 || !(L > 0.0) || N < 1 || N > 64) {
    throw FormatError("snapshot header describes an invalid lattice");
  }
  double sites = 1.0;
  for (std::uint32_t k = 0; k < m; ++k) sites *= n;
  const double expected = sites * (16.0 * N + 8.0 * m);
  if (static_cast<double>(r.remaining()) != expected) {
    throw FormatError("snapshot payload length does not match header (expected " +
                      std::to_string(static_cast<long long>(expected)) + " bytes, found " +
                      std::to_string(r.remaining()) + ")");
  }

  LatticePtr lat;
  try {
    lat = build_lattice(static_cast<int>(m), static_cast<int>(n), L);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("snapshot header: ") + e.what());
  }
  Snapshot snap{FlowState{t, SpinorField(lat, static_cast<int>(N)), LinkField(lat)},
                ModelParams{S, lat, static_cast<int>(N)}};
  for (auto& z : snap.state.phi.values()) {
    const double re = r.f64();
    const double im = r.f64();
    z = Complex(re, im);
  }
  for (auto& v : snap.state.a.values()) v = r.f64();
  return snap;
}

void write_snapshot(const FlowState& state, const ModelParams& params, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(state, params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace swflow
