#include "pporpe/cli/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pporpe::cli {

namespace {

constexpr char kMagic[8] = {'P', 'P', 'O', 'R', 'P', 'E', 'W', 'T'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  std::vector<std::uint8_t> out;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw WeightsError("weights file is truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> encode_weights(const std::vector<NamedNet>& nets) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kWeightsVersion);
  w.u32(static_cast<std::uint32_t>(nets.size()));
  for (const auto& [name, net] : nets) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.u32(net.activation() == Activation::tanh ? 0u : 1u);
    w.u32(static_cast<std::uint32_t>(net.layer_sizes().size()));
    for (int s : net.layer_sizes()) w.u32(static_cast<std::uint32_t>(s));
    w.u64(net.parameter_count());
    for (Eigen::Index i = 0; i < net.parameters().size(); ++i) w.f64(net.parameters()[i]);
  }
  w.u64(fnv1a(w.out.data(), w.out.size()));
  return std::move(w.out);
}

std::vector<NamedNet> decode_weights(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kMagic + 16) throw WeightsError("weights file is truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw WeightsError("not a weights file (bad magic)");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.u64() != fnv1a(bytes.data(), body)) throw WeightsError("weights checksum mismatch");

  Reader r(bytes.data() + sizeof kMagic, body - sizeof kMagic);
  const std::uint32_t version = r.u32();
  if (version != kWeightsVersion)
    throw WeightsError("unsupported weights version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  std::vector<NamedNet> nets;
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedNet entry;
    entry.name = r.str(r.u32());
    const std::uint32_t act = r.u32();
    if (act > 1) throw WeightsError("unknown activation tag");
    const std::uint32_t layers = r.u32();
    if (layers < 2 || layers > 64) throw WeightsError("implausible layer count");
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < layers; ++i) {
      const std::uint32_t width = r.u32();
      if (width == 0 || width > (1u << 20)) throw WeightsError("implausible layer width");
      sizes.push_back(static_cast<int>(width));
    }
    entry.net = Mlp(sizes, act == 0 ? Activation::tanh : Activation::swish);
    const std::uint64_t n = r.u64();
    if (n != entry.net.parameter_count()) throw WeightsError("parameter count disagrees with shape");
    for (std::uint64_t i = 0; i < n; ++i) entry.net.parameters()[static_cast<Eigen::Index>(i)] = r.f64();
    nets.push_back(std::move(entry));
  }
  if (r.remaining() != 0) throw WeightsError("trailing bytes in weights file");
  return nets;
}

void save_weights(const std::filesystem::path& path, const std::vector<NamedNet>& nets) {
  const auto bytes = encode_weights(nets);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WeightsError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<NamedNet> load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsError("cannot open weights file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_weights(bytes);
}

const Mlp& find_net(const std::vector<NamedNet>& nets, const std::string& name) {
  for (const auto& n : nets)
    if (n.name == name) return n.net;
  throw WeightsError("weights file has no network named '" + name + "'");
}

}  // namespace pporpe::cli
