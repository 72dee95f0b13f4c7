#include "pporpe/cli/config_io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "pporpe/errors.hpp"

#ifndef PPORPE_VERSION
#define PPORPE_VERSION "0.1.0"
#endif

namespace pporpe::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_integer(key, trim(item))));
  return out;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

using Setter = std::function<void(TrainerConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"env", [](TrainerConfig& c, auto&, auto& v) { c.env = v; }},
      {"method", [](TrainerConfig& c, auto&, auto& v) { c.surrogate.method = parse_method(v); }},
      {"beta", [](TrainerConfig& c, auto& k, auto& v) { c.surrogate.beta = to_double(k, v); }},
      {"epsilon", [](TrainerConfig& c, auto& k, auto& v) { c.surrogate.epsilon = to_double(k, v); }},
      {"eta", [](TrainerConfig& c, auto& k, auto& v) { c.surrogate.eta = to_double(k, v); }},
      {"log_ratio_clamp",
       [](TrainerConfig& c, auto& k, auto& v) { c.surrogate.log_ratio_clamp = to_double(k, v); }},
      {"lambda", [](TrainerConfig& c, auto& k, auto& v) { c.threshold.lambda = to_double(k, v); }},
      {"kappa", [](TrainerConfig& c, auto& k, auto& v) { c.threshold.kappa = to_double(k, v); }},
      {"delta_lower",
       [](TrainerConfig& c, auto& k, auto& v) { c.threshold.delta_lower = to_double(k, v); }},
      {"per_sample_threshold",
       [](TrainerConfig& c, auto& k, auto& v) { c.threshold.per_sample = to_bool(k, v); }},
      {"episodes",
       [](TrainerConfig& c, auto& k, auto& v) { c.episodes = static_cast<int>(to_integer(k, v)); }},
      {"steps_per_update",
       [](TrainerConfig& c, auto& k, auto& v) { c.steps_per_update = static_cast<int>(to_integer(k, v)); }},
      {"batch_size",
       [](TrainerConfig& c, auto& k, auto& v) { c.batch_size = static_cast<int>(to_integer(k, v)); }},
      {"capacity",
       [](TrainerConfig& c, auto& k, auto& v) {
         const long long n = to_integer(k, v);
         if (n <= 0) throw ConfigError("capacity must be positive");
         c.capacity = static_cast<std::size_t>(n);
       }},
      {"learning_rate", [](TrainerConfig& c, auto& k, auto& v) { c.learning_rate = to_double(k, v); }},
      {"discount", [](TrainerConfig& c, auto& k, auto& v) { c.discount = to_double(k, v); }},
      {"actor_polyak", [](TrainerConfig& c, auto& k, auto& v) { c.actor_polyak = to_double(k, v); }},
      {"critic_polyak", [](TrainerConfig& c, auto& k, auto& v) { c.critic_polyak = to_double(k, v); }},
      {"entropy_bonus", [](TrainerConfig& c, auto& k, auto& v) { c.entropy_bonus = to_double(k, v); }},
      {"max_grad_norm", [](TrainerConfig& c, auto& k, auto& v) { c.max_grad_norm = to_double(k, v); }},
      {"hidden_layers", [](TrainerConfig& c, auto& k, auto& v) { c.hidden_layers = to_int_list(k, v); }},
      {"activation", [](TrainerConfig& c, auto&, auto& v) { c.activation = parse_activation(v); }},
      {"seed",
       [](TrainerConfig& c, auto& k, auto& v) {
         std::uint64_t s = 0;
         const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc{} || end != v.data() + v.size() || v.empty())
           throw ConfigError("'" + k + "' expects a nonnegative integer, got '" + v + "'");
         c.seed = s;
       }},
  };
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, trim(t.substr(eq + 1))).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

void apply_key_values(const std::map<std::string, std::string>& values, TrainerConfig& config) {
  for (const auto& [key, value] : values) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second(config, key, value);
  }
}

std::vector<std::pair<std::string, std::string>> to_key_values(const TrainerConfig& c) {
  return {
      {"env", c.env},
      {"method", std::string(to_string(c.surrogate.method))},
      {"beta", format_double(c.surrogate.beta)},
      {"epsilon", format_double(c.surrogate.epsilon)},
      {"eta", format_double(c.surrogate.eta)},
      {"log_ratio_clamp", format_double(c.surrogate.log_ratio_clamp)},
      {"lambda", format_double(c.threshold.lambda)},
      {"kappa", format_double(c.threshold.kappa)},
      {"delta_lower", format_double(c.threshold.delta_lower)},
      {"per_sample_threshold", c.threshold.per_sample ? "true" : "false"},
      {"episodes", std::to_string(c.episodes)},
      {"steps_per_update", std::to_string(c.steps_per_update)},
      {"batch_size", std::to_string(c.batch_size)},
      {"capacity", std::to_string(c.capacity)},
      {"learning_rate", format_double(c.learning_rate)},
      {"discount", format_double(c.discount)},
      {"actor_polyak", format_double(c.actor_polyak)},
      {"critic_polyak", format_double(c.critic_polyak)},
      {"entropy_bonus", format_double(c.entropy_bonus)},
      {"max_grad_norm", format_double(c.max_grad_norm)},
      {"hidden_layers", join(c.hidden_layers)},
      {"activation", std::string(to_string(c.activation))},
      {"seed", std::to_string(c.seed)},
  };
}

std::string artifact_version() { return PPORPE_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render_manifest(const RunManifest& m) {
  std::ostringstream os;
  os << "# pporpe run manifest\n";
  os << "version=" << m.version << "\n";
  os << "timestamp=" << m.timestamp << "\n";
  os << "out=" << m.out_dir.string() << "\n";
  for (const auto& [k, v] : to_key_values(m.config)) os << k << "=" << v << "\n";
  return os.str();
}

RunManifest parse_manifest(const std::string& text) {
  auto values = parse_key_values(text);
  RunManifest m;
  auto take = [&](const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) return std::string();
    std::string v = it->second;
    values.erase(it);
    return v;
  };
  m.version = take("version");
  m.timestamp = take("timestamp");
  m.out_dir = take("out");
  apply_key_values(values, m.config);
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_manifest(manifest);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace pporpe::cli
