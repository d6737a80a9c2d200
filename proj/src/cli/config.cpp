#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace shufflemix::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_unsigned(const std::string& value, const std::string& where) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty())
    throw ConfigError(where + ": expected a nonnegative integer, got '" + value + "'");
  return out;
}

char parse_family(const std::string& value, const std::string& where) {
  if (value.size() != 1 || value[0] < 'a' || value[0] > 'd')
    throw ConfigError(where + ": family must be one of a, b, c, d, got '" + value + "'");
  return value[0];
}

void assign(ExperimentConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  if (key == "preset") {
    if (std::find(preset_names().begin(), preset_names().end(), value) == preset_names().end())
      throw ConfigError(where + ": unknown preset '" + value + "'");
    cfg.preset = value;
  } else if (key == "n") {
    cfg.n = parse_unsigned<std::size_t>(value, where);
  } else if (key == "k") {
    cfg.k = parse_unsigned<std::size_t>(value, where);
  } else if (key == "family") {
    cfg.family = parse_family(value, where);
  } else if (key == "samples") {
    cfg.samples = parse_unsigned<std::size_t>(value, where);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned<std::uint64_t>(value, where);
  } else if (key == "t") {
    cfg.horizon = parse_unsigned<std::uint64_t>(value, where);
  } else if (key == "cap") {
    cfg.cap = parse_unsigned<std::uint64_t>(value, where);
  } else if (key == "threads") {
    cfg.threads = parse_unsigned<unsigned>(value, where);
  } else if (key == "out") {
    if (value.empty()) throw ConfigError(where + ": out must not be empty");
    cfg.out_dir = value;
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
std::string show(const std::optional<T>& v) {
  if (!v) return "default";
  std::ostringstream os;
  os << *v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"theorem-3-1", "tau-u",       "spectral-b2t", "spectral-two-point",
                                                 "couple-b2t",  "couple-mtf",  "u-stat",       "open-k09n"};
  return names;
}

bool is_monte_carlo(const std::string& preset) {
  return preset == "couple-b2t" || preset == "couple-mtf" || preset == "u-stat";
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    assign(cfg, key, value, where);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ExperimentConfig merge(ExperimentConfig base, const ExperimentConfig& over) {
  if (!over.preset.empty()) base.preset = over.preset;
  if (over.n) base.n = over.n;
  if (over.k) base.k = over.k;
  if (over.family) base.family = over.family;
  if (over.samples) base.samples = over.samples;
  if (over.seed) base.seed = over.seed;
  if (over.horizon) base.horizon = over.horizon;
  if (over.cap) base.cap = over.cap;
  if (over.threads) base.threads = over.threads;
  if (over.out_dir) base.out_dir = over.out_dir;
  return base;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.preset.empty()) throw ConfigError("no preset given");
  if (is_monte_carlo(cfg.preset) && !cfg.seed)
    throw ConfigError("preset '" + cfg.preset + "' is Monte Carlo: --seed is mandatory");
  if (cfg.samples && *cfg.samples == 0) throw ConfigError("samples must be positive");
  if (cfg.n && *cfg.n < 2) throw ConfigError("n must be at least 2");
  if (cfg.k && *cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.n && cfg.k && *cfg.k > *cfg.n) throw ConfigError("k must not exceed n");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::describe() const {
  return {{"config.preset", preset},
          {"config.n", show(n)},
          {"config.k", show(k)},
          {"config.family", family ? std::string(1, *family) : "default"},
          {"config.samples", show(samples)},
          {"config.seed", show(seed)},
          {"config.t", show(horizon)},
          {"config.cap", show(cap)}};
}

}  // namespace shufflemix::cli
