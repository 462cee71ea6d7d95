#pragma once

// Comma-separated tables with a '#'-prefixed metadata header that documents
// each column and its unit.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sivsim/errors.hpp"

namespace sivsim::cli {

// Shortest round-trip representation; identical input gives identical text.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Column {
  std::string name;
  std::string unit;
};

class Table {
 public:
  Table(std::string title, std::vector<Column> columns) : title_(std::move(title)), columns_(std::move(columns)) {}

  void note(std::string line) { notes_.push_back(std::move(line)); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(fmt(v));
    row(std::move(cells));
  }

  void row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error("table row width does not match the header");
    rows_.push_back(std::move(cells));
  }

  std::size_t rows() const noexcept { return rows_.size(); }

  void write(const std::filesystem::path& path, const std::string& preamble) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "# " << preamble << '\n' << "# " << title_ << '\n';
    for (const auto& n : notes_) out << "# " << n << '\n';
    for (const auto& c : columns_) out << "# column " << c.name << " [" << c.unit << "]\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i].name;
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
  }

 private:
  std::string title_;
  std::vector<Column> columns_;
  std::vector<std::string> notes_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace sivsim::cli
