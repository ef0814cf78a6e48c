#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "boxlab/numeric.hpp"

namespace boxlab::io {

/// Minimal CSV emitter: '.' decimals via to_chars, LF line endings, and
/// leading "# key: value" comment lines for run metadata.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(std::string_view key, std::string_view value) { os_ << "# " << key << ": " << value << '\n'; }

  void header(const std::vector<std::string>& cols) { row(cols); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline std::string cell(double v) { return to_string(v); }
inline std::string cell(const Rational& v) { return to_string(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::string_view v) { return std::string(v); }

}  // namespace boxlab::io
