#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace shufflemix::cli {

std::string fmt(double v);
std::string fmt(std::uint64_t v);
std::string fmt(std::int64_t v);
inline std::string fmt(unsigned v) { return fmt(static_cast<std::uint64_t>(v)); }
inline std::string fmt_bool(bool b) { return b ? "1" : "0"; }

// One preset's output: a CSV table plus key/value summary lines.
class Report {
 public:
  explicit Report(std::string preset) : preset_(std::move(preset)) {}

  void set_header(std::vector<std::string> columns) { header_ = std::move(columns); }
  void add_row(std::vector<std::string> cells);
  void add_summary(std::string key, std::string value) { summary_.emplace_back(std::move(key), std::move(value)); }

  // Records an assertion; failed ones are listed in the summary.
  void check(bool ok, const std::string& label);
  void set_exploratory() { exploratory_ = true; }

  bool passed() const noexcept { return failures_.empty(); }
  std::size_t assertions() const noexcept { return assertions_; }
  const std::vector<std::string>& failures() const noexcept { return failures_; }

  std::string csv() const;
  std::string summary_text() const;
  // Writes <dir>/<preset>.csv and <dir>/<preset>.summary.txt.
  void write(const std::string& dir) const;

 private:
  std::string preset_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> summary_;
  std::vector<std::string> failures_;
  std::size_t assertions_ = 0;
  bool exploratory_ = false;
};

}  // namespace shufflemix::cli
