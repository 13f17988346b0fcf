#pragma once

// Ingestion of posts and prices, exact-text deduplication, and the token
// vocabulary shared by the downstream stages.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "narr/csv.hpp"
#include "narr/date.hpp"
#include "narr/error.hpp"

namespace narr {

struct RawPost {
  std::string id;
  Instant timestamp;
  std::string text;

  Day day() const { return day_of(timestamp); }
  friend bool operator==(const RawPost&, const RawPost&) = default;
};

enum class PostFormat { csv, jsonl };

inline std::optional<PostFormat> parse_post_format(std::string_view s) {
  if (s == "csv") return PostFormat::csv;
  if (s == "jsonl" || s == "ndjson") return PostFormat::jsonl;
  return std::nullopt;
}

// Guess from the extension: .jsonl/.ndjson/.json are JSON lines, anything else CSV.
inline PostFormat post_format_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return PostFormat::jsonl;
  return PostFormat::csv;
}

struct LoadOptions {
  std::optional<Day> from;  // inclusive
  std::optional<Day> to;    // inclusive
};

struct DropCounts {
  std::size_t missing_id = 0;
  std::size_t empty_text = 0;
  std::size_t bad_timestamp = 0;
  std::size_t duplicate_id = 0;
  std::size_t out_of_window = 0;

  std::size_t total() const {
    return missing_id + empty_text + bad_timestamp + duplicate_id + out_of_window;
  }
};

struct PostLoad {
  std::vector<RawPost> posts;
  DropCounts dropped;
};

namespace detail {

inline bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Field names accepted for each RawPost column.
inline constexpr std::array<std::string_view, 3> kIdKeys = {"id", "doc_id", "tweet_id"};
inline constexpr std::array<std::string_view, 3> kTimeKeys = {"created_at", "timestamp", "date"};
inline constexpr std::array<std::string_view, 2> kTextKeys = {"text", "content"};

class PostCollector {
 public:
  explicit PostCollector(const LoadOptions& opts) : opts_(opts) {}

  void offer(std::string id, std::string_view ts, std::string text) {
    if (id.empty()) {
      ++out_.dropped.missing_id;
      return;
    }
    if (is_blank(text) || text == "NA" || text == "NaN" || text == "null") {
      ++out_.dropped.empty_text;
      return;
    }
    auto t = parse_timestamp(CsvHeader::trim(ts));
    if (!t) {
      ++out_.dropped.bad_timestamp;
      return;
    }
    Day d = day_of(*t);
    if ((opts_.from && d < *opts_.from) || (opts_.to && d > *opts_.to)) {
      ++out_.dropped.out_of_window;
      return;
    }
    if (!ids_.insert(id).second) {
      ++out_.dropped.duplicate_id;
      return;
    }
    out_.posts.push_back(RawPost{std::move(id), *t, std::move(text)});
  }

  PostLoad finish(const std::string& source) && {
    if (out_.posts.empty()) throw Error(source + ": zero surviving rows");
    return std::move(out_);
  }

 private:
  LoadOptions opts_;
  PostLoad out_;
  std::unordered_set<std::string> ids_;
};

inline std::string json_scalar(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  return {};
}

inline std::string json_field(const nlohmann::json& obj, std::span<const std::string_view> keys) {
  for (auto k : keys) {
    auto it = obj.find(std::string(k));
    if (it != obj.end()) return json_scalar(*it);
  }
  return {};
}

}  // namespace detail

inline PostLoad read_posts_csv(std::istream& in, const std::string& source, const LoadOptions& opts = {}) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(source + ": zero surviving rows");
  CsvHeader header(row);
  auto id_col = header.find_any(detail::kIdKeys);
  auto ts_col = header.find_any(detail::kTimeKeys);
  auto text_col = header.find_any(detail::kTextKeys);
  if (!id_col || !ts_col || !text_col)
    throw ParseError(source, reader.line(), "header must name id, created_at and text columns");

  detail::PostCollector collect(opts);
  auto cell = [&](std::size_t i) -> std::string { return i < row.size() ? row[i] : std::string{}; };
  while (reader.next(row))
    collect.offer(CsvHeader::trim(cell(*id_col)), cell(*ts_col), cell(*text_col));
  return std::move(collect).finish(source);
}

inline PostLoad read_posts_jsonl(std::istream& in, const std::string& source, const LoadOptions& opts = {}) {
  detail::PostCollector collect(opts);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError(source, lineno, "not a JSON object");
    collect.offer(detail::json_field(obj, detail::kIdKeys), detail::json_field(obj, detail::kTimeKeys),
                  detail::json_field(obj, detail::kTextKeys));
  }
  return std::move(collect).finish(source);
}

inline PostLoad load_posts(const std::filesystem::path& path, PostFormat format, const LoadOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return format == PostFormat::csv ? read_posts_csv(in, path.string(), opts)
                                   : read_posts_jsonl(in, path.string(), opts);
}

// Keeps the first post for each exact raw text; relative order preserved.
inline std::vector<RawPost> dedup(const std::vector<RawPost>& posts) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(posts.size());
  std::vector<RawPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts)
    if (seen.insert(p.text).second) out.push_back(p);
  return out;
}

struct PricePoint {
  Day date;
  double close;
  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

// Daily closes with strictly increasing dates and positive values.
class PriceSeries {
 public:
  PriceSeries() = default;
  explicit PriceSeries(std::vector<PricePoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(points_[i].close > 0) || !std::isfinite(points_[i].close))
        throw Error("price on " + format_date(points_[i].date) + " is not a positive number");
      if (i > 0 && !(points_[i - 1].date < points_[i].date))
        throw Error("price dates not strictly increasing at " + format_date(points_[i].date));
    }
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const PricePoint& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  std::vector<double> log_closes() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(std::log(p.close));
    return out;
  }

  std::optional<double> close_on(Day d) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), d,
                               [](const PricePoint& p, Day key) { return p.date < key; });
    if (it == points_.end() || it->date != d) return std::nullopt;
    return it->close;
  }

 private:
  std::vector<PricePoint> points_;
};

inline PriceSeries read_prices(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(source + ": empty price file");
  CsvHeader header(row);
  auto date_col = header.find("date");
  auto close_col = header.find("close");
  if (!date_col || !close_col) throw ParseError(source, reader.line(), "expected header date,close");

  std::vector<PricePoint> points;
  while (reader.next(row)) {
    if (row.size() <= std::max(*date_col, *close_col)) throw ParseError(source, reader.line(), "short row");
    auto d = parse_date(CsvHeader::trim(row[*date_col]));
    if (!d) throw ParseError(source, reader.line(), "bad date '" + row[*date_col] + "'");
    auto c = parse_double(row[*close_col]);
    if (!c) throw ParseError(source, reader.line(), "bad close '" + row[*close_col] + "'");
    if (!(*c > 0)) throw ParseError(source, reader.line(), "close must be positive");
    if (!points.empty() && !(points.back().date < *d))
      throw ParseError(source, reader.line(), "dates must be strictly increasing");
    points.push_back({*d, *c});
  }
  return PriceSeries(std::move(points));
}

inline PriceSeries load_prices(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_prices(in, path.string());
}

using TokenId = std::uint32_t;

// Dense token <-> id map. Ids are assigned in registration order.
class Vocabulary {
 public:
  TokenId add(std::string_view token) {
    auto it = index_.find(std::string(token));
    if (it != index_.end()) return it->second;
    auto id = static_cast<TokenId>(tokens_.size());
    tokens_.emplace_back(token);
    index_.emplace(tokens_.back(), id);
    return id;
  }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace narr
