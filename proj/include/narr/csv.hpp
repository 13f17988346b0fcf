#pragma once

// Minimal RFC 4180 reader/writer plus exact number formatting.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "narr/error.hpp"

namespace narr {

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record. Blank lines are skipped. Returns false at EOF.
  bool next(std::vector<std::string>& row) {
    for (;;) {
      row.clear();
      int c = in_.get();
      if (c == std::char_traits<char>::eof()) return false;
      ++line_;
      record_line_ = line_;
      if (c == '\n') continue;
      if (c == '\r') {
        if (in_.peek() == '\n') in_.get();
        continue;
      }
      in_.unget();
      read_record(row);
      return true;
    }
  }

  // Physical line on which the last record started (1-based).
  std::size_t line() const { return record_line_; }

 private:
  void read_record(std::vector<std::string>& row) {
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;;) {
      int c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        row.push_back(std::move(field));
        return;
      }
      char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
      } else if (ch == ',') {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        row.push_back(std::move(field));
        return;
      } else {
        field.push_back(ch);
      }
    }
  }

  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

// Column-name lookup over a header row. Names are matched after trimming.
class CsvHeader {
 public:
  CsvHeader() = default;
  explicit CsvHeader(const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) index_.emplace(trim(row[i]), i);
  }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // First of several accepted aliases.
  std::optional<std::size_t> find_any(std::span<const std::string_view> names) const {
    for (auto n : names)
      if (auto i = find(n)) return i;
    return std::nullopt;
  }

  static std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

inline void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  write_csv_row(out, std::span<const std::string>(fields.begin(), fields.size()));
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s) {
  std::string t = CsvHeader::trim(s);
  if (t.empty()) return std::nullopt;
  const char* b = t.data();
  if (*b == '+') ++b;
  double v = 0;
  auto [end, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc{} || end != t.data() + t.size()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  std::string t = CsvHeader::trim(s);
  Int v{};
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) return std::nullopt;
  return v;
}

}  // namespace narr
