#pragma once

// Minimal CSV writer: header row, '.' decimal separator, LF line endings,
// %.12g number formatting. Streams are opened in binary mode so output is
// byte-identical across platforms.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "relsim/errors.hpp"

namespace relsim {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot open output file: " + path.string());
  }

  void header(const std::vector<std::string>& columns) { write_row(columns); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    write_row(cells);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace relsim
