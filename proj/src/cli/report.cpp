#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace shufflemix::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

void Report::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("row width does not match the CSV header");
  rows_.push_back(std::move(cells));
}

void Report::check(bool ok, const std::string& label) {
  ++assertions_;
  if (!ok) failures_.push_back(label);
}

std::string Report::csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string Report::summary_text() const {
  std::string out = "preset: " + preset_ + "\n";
  for (const auto& [k, v] : summary_) out += k + ": " + v + "\n";
  out += "assertions: " + std::to_string(assertions_) + "\n";
  out += "failed: " + std::to_string(failures_.size()) + "\n";
  for (const auto& f : failures_) out += "failure: " + f + "\n";
  out += std::string("status: ") + (!passed() ? "fail" : (exploratory_ ? "exploratory" : "pass")) + "\n";
  return out;
}

void Report::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / preset_;
  for (const auto& [suffix, text] : {std::pair{".csv", csv()}, std::pair{".summary.txt", summary_text()}}) {
    std::ofstream f(base.string() + suffix, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + base.string() + suffix);
    f << text;
  }
}

}  // namespace shufflemix::cli
