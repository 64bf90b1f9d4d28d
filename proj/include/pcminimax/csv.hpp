#pragma once

#include <concepts>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace pcm {

/// Formats a double with 17 significant digits so it round-trips exactly.
std::string format_double(double v);

/// Minimal CSV emitter: integers verbatim, doubles at 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string line;
    (append(line, fields), ...);
    line.back() = '\n';
    out_ << line;
  }

 private:
  static void append(std::string& line, double v) { line += format_double(v) + ','; }
  static void append(std::string& line, std::integral auto v) { line += std::to_string(v) + ','; }
  static void append(std::string& line, std::string_view v) {
    line += v;
    line += ',';
  }

  std::ofstream out_;
};

}  // namespace pcm
