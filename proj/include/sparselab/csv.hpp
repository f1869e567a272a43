#pragma once
// CSV emission: comma-separated, UTF-8, header row, doubles printed with 17
// significant digits so values round-trip exactly. Batch appends enforce
// header stability.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparselab {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct CsvWriter {
  std::string header;
  std::vector<std::string> rows;

  void add_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) row += ',';
      row += fields[i];
    }
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::string out = header;
    out += '\n';
    for (const auto& r : rows) {
      out += r;
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    f << str();
  }

  // Appends rows to an existing results file; a new or empty file gets the
  // header first, an existing one must carry the identical header already.
  void append(const std::string& path) const {
    std::string existing_header;
    {
      std::ifstream f(path);
      if (f) std::getline(f, existing_header);
    }
    if (existing_header.empty()) {
      write_all(path, /*with_header=*/true);
      return;
    }
    if (existing_header != header) {
      throw std::runtime_error(
          "csv: header mismatch appending to '" + path + "' (expected '" +
          header + "', found '" + existing_header + "')");
    }
    write_all(path, /*with_header=*/false);
  }

 private:
  void write_all(const std::string& path, bool with_header) const {
    std::ofstream f(path, with_header ? std::ios::trunc : std::ios::app);
    if (!f) throw std::runtime_error("csv: cannot open '" + path + "'");
    if (with_header) f << header << '\n';
    for (const auto& r : rows) f << r << '\n';
  }
};

}  // namespace sparselab
