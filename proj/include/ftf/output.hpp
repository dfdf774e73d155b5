#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ftf {

using Cell = std::variant<double, long long, std::string>;

std::string format_double(double v);  // %.17g, locale-independent
std::uint64_t fnv1a64(const std::string& data);

// Column-oriented sweep records with a '#'-prefixed metadata block. Two
// runs with identical inputs produce identical bytes.
class SweepTable {
 public:
  SweepTable(std::string command, std::vector<std::string> columns);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, std::uint64_t value);
  void add_row(std::vector<Cell> cells);

  std::string csv() const;
  std::string jsonl() const;

 private:
  std::string command_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace ftf
