#include "ftf/output.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ftf/errors.hpp"
#include "ftf/version.hpp"

namespace ftf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

SweepTable::SweepTable(std::string command, std::vector<std::string> columns)
    : command_(std::move(command)), columns_(std::move(columns)) {}

void SweepTable::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void SweepTable::meta(const std::string& key, std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  meta_.emplace_back(key, buf);
}

void SweepTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size())
    throw Error("cli", "row width mismatch in table '" + command_ + "'");
  rows_.push_back(std::move(cells));
}

namespace {

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  return std::get<std::string>(c);
}

}  // namespace

std::string SweepTable::csv() const {
  std::ostringstream out;
  out << "# ftf-sim " << version_string << "\n";
  out << "# command: " << command_ << "\n";
  for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << "\n";
  for (size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string SweepTable::jsonl() const {
  std::ostringstream out;
  nlohmann::json header;
  header["generator"] = std::string("ftf-sim ") + version_string;
  header["command"] = command_;
  for (const auto& [k, v] : meta_) header[k] = v;
  out << header.dump() << "\n";
  for (const auto& row : rows_) {
    nlohmann::json j;
    for (size_t i = 0; i < row.size(); ++i) {
      if (std::holds_alternative<double>(row[i]))
        j[columns_[i]] = std::get<double>(row[i]);
      else if (std::holds_alternative<long long>(row[i]))
        j[columns_[i]] = std::get<long long>(row[i]);
      else
        j[columns_[i]] = std::get<std::string>(row[i]);
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace ftf
