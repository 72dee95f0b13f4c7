#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pporpe/tensor_net.hpp"

namespace pporpe::cli {

/// Raised for unreadable, truncated or checksum-mismatched weight files.
class WeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedNet {
  std::string name;
  Mlp net;
};

// Layout (all integers little-endian):
//   "PPORPEWT" | u32 version | u32 net count
//   per net: u32 name length | name | u32 activation | u32 layer count |
//            u32 sizes... | u64 parameter count | f64 parameters...
//   u64 FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kWeightsVersion = 1;

std::vector<std::uint8_t> encode_weights(const std::vector<NamedNet>& nets);
std::vector<NamedNet> decode_weights(const std::vector<std::uint8_t>& bytes);

void save_weights(const std::filesystem::path& path, const std::vector<NamedNet>& nets);
std::vector<NamedNet> load_weights(const std::filesystem::path& path);

/// Finds `name` in a decoded file; throws WeightsError when absent.
const Mlp& find_net(const std::vector<NamedNet>& nets, const std::string& name);

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size);

}  // namespace pporpe::cli
