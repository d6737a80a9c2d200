#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shufflemix::cli {

// Bad command line or config file; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string preset;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::optional<char> family;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;  // key "t": u-stat time horizon
  std::optional<std::uint64_t> cap;      // coupling step cap, 0 = default
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;

  // key: value pairs for the summary, in a fixed order.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

inline constexpr const char* kOutDirEnv = "SHUFFLEMIX_OUT_DIR";

const std::vector<std::string>& preset_names();
bool is_monte_carlo(const std::string& preset);

// Flat key = value file; '#' starts a comment. Errors name the file and line.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source);

// Fields set in `over` replace those in `base`.
ExperimentConfig merge(ExperimentConfig base, const ExperimentConfig& over);

// Preset-independent checks (mandatory seed, family letter, ranges).
void validate(const ExperimentConfig& cfg);

}  // namespace shufflemix::cli
