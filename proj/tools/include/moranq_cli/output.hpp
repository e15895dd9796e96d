#pragma once

// CSV, SVG and manifest emission with write-temp-then-rename semantics.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "moranq/gersho.hpp"

namespace moranq::cli {

// Writes `content` to `<path>.tmp` and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Shortest text that reads back to the same double ("%.17g" fallback).
std::string format_number(double value);

// Builds RFC 4180 style CSV text with "\n" line endings.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header);

  Csv& cell(std::string_view text);
  Csv& cell(const char* text) { return cell(std::string_view(text)); }
  Csv& cell(const std::string& text) { return cell(std::string_view(text)); }
  Csv& cell(double value);
  Csv& cell(long long value);
  Csv& cell(std::size_t value);
  Csv& cell(int value) { return cell(static_cast<long long>(value)); }
  Csv& cell(bool value) { return cell(std::string_view(value ? "true" : "false")); }
  Csv& empty() { return cell(std::string_view{}); }
  void end_row();

  const std::string& text() const { return text_; }

 private:
  std::string text_;
  bool row_open_ = false;
};

// Static scatter of n J_low / e and n J_high / e against n, log-scaled.
std::string ratio_svg(const RatioTable& table, std::string_view title);

}  // namespace moranq::cli
