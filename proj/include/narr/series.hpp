#pragma once

// Per-narrative daily sentiment series, correlation with price, and
// distribution summaries. Days without posts are gaps, never zeros.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "narr/corpus.hpp"
#include "narr/csv.hpp"
#include "narr/date.hpp"
#include "narr/error.hpp"

namespace narr {

// cluster id -> narrative label. Several clusters may share a label.
class LabelMap {
 public:
  void set(std::uint32_t cluster, std::string label) {
    if (label.empty()) throw Error("empty narrative label for cluster " + std::to_string(cluster));
    labels_[cluster] = std::move(label);
  }

  std::string label(std::uint32_t cluster) const {
    auto it = labels_.find(cluster);
    return it != labels_.end() ? it->second : "cluster-" + std::to_string(cluster);
  }

  const std::map<std::uint32_t, std::string>& entries() const { return labels_; }

 private:
  std::map<std::uint32_t, std::string> labels_;
};

// Lines of `cluster_id=label`; '#' starts a comment.
inline LabelMap read_label_map(std::istream& in, const std::string& source) {
  LabelMap m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = CsvHeader::trim(line);
    if (!t.empty() && t.back() == '\r') t = CsvHeader::trim(t.substr(0, t.size() - 1));
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected cluster_id=label");
    auto k = parse_int<std::uint32_t>(t.substr(0, eq));
    if (!k) throw ParseError(source, lineno, "bad cluster id");
    auto label = CsvHeader::trim(t.substr(eq + 1));
    if (label.empty()) throw ParseError(source, lineno, "empty label");
    m.set(*k, std::move(label));
  }
  return m;
}

inline LabelMap load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_label_map(in, path.string());
}

struct DayStat {
  double mean;
  std::size_t count;
  friend bool operator==(const DayStat&, const DayStat&) = default;
};

struct NarrativeSeries {
  std::string label;
  std::map<Day, DayStat> days;

  std::map<Day, double> means() const {
    std::map<Day, double> out;
    for (const auto& [d, s] : days) out.emplace(d, s.mean);
    return out;
  }

  std::size_t total_posts() const {
    std::size_t n = 0;
    for (const auto& [d, s] : days) n += s.count;
    return n;
  }

  friend bool operator==(const NarrativeSeries&, const NarrativeSeries&) = default;
};

namespace detail {

template <class A, class B>
void require_same_keys(const std::map<std::string, A>& a, const std::map<std::string, B>& b, const char* what) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; }))
    throw Error(std::string("build_series: doc_id sets differ between labels and ") + what);
}

}  // namespace detail

// Daily mean composite per narrative; series come out ordered by label.
inline std::vector<NarrativeSeries> build_series(const std::map<std::string, std::uint32_t>& labels,
                                                 const std::map<std::string, double>& composites,
                                                 const std::map<std::string, Day>& days, const LabelMap& map) {
  detail::require_same_keys(labels, composites, "composites");
  detail::require_same_keys(labels, days, "days");

  std::map<std::string, std::map<Day, std::pair<double, std::size_t>>> acc;
  auto c = composites.begin();
  auto d = days.begin();
  for (auto l = labels.begin(); l != labels.end(); ++l, ++c, ++d) {
    auto& cell = acc[map.label(l->second)][d->second];
    cell.first += c->second;
    ++cell.second;
  }

  std::vector<NarrativeSeries> out;
  for (auto& [label, by_day] : acc) {
    NarrativeSeries s{label, {}};
    for (const auto& [day, sc] : by_day)
      s.days.emplace(day, DayStat{std::clamp(sc.first / static_cast<double>(sc.second), -1.0, 1.0), sc.second});
    out.push_back(std::move(s));
  }
  return out;
}

// Centered moving average of the daily means over `window` consecutive
// observed days (odd). Ends use the available neighbours. Counts unchanged.
inline NarrativeSeries smooth(const NarrativeSeries& s, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw Error("smoothing window must be odd");
  if (window == 1) return s;
  std::vector<std::pair<Day, DayStat>> v(s.days.begin(), s.days.end());
  const std::size_t h = window / 2;
  NarrativeSeries out{s.label, {}};
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t lo = i >= h ? i - h : 0, hi = std::min(v.size() - 1, i + h);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += v[j].second.mean;
    out.days.emplace(v[i].first, DayStat{sum / static_cast<double>(hi - lo + 1), v[i].second.count});
  }
  return out;
}

enum class CorrelationMethod { pearson, spearman };

inline std::optional<CorrelationMethod> parse_correlation(std::string_view s) {
  if (s == "pearson") return CorrelationMethod::pearson;
  if (s == "spearman") return CorrelationMethod::spearman;
  return std::nullopt;
}

namespace detail {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks, ties share their average rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline bool all_equal(const std::vector<double>& v) {
  return std::ranges::adjacent_find(v, std::ranges::not_equal_to{}) == v.end();
}

}  // namespace detail

// Correlation over the days present in both series.
inline double correlate(const std::map<Day, double>& a, const std::map<Day, double>& b,
                        CorrelationMethod method = CorrelationMethod::pearson) {
  std::vector<double> x, y;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end() && ib != b.end();) {
    if (ia->first < ib->first)
      ++ia;
    else if (ib->first < ia->first)
      ++ib;
    else {
      x.push_back(ia->second);
      y.push_back(ib->second);
      ++ia;
      ++ib;
    }
  }
  if (x.size() < 3) throw Error("correlate: fewer than 3 overlapping days");
  if (detail::all_equal(x) || detail::all_equal(y)) throw Error("correlate: zero variance over the overlap");
  if (method == CorrelationMethod::spearman) return detail::pearson(detail::ranks(x), detail::ranks(y));
  return detail::pearson(x, y);
}

struct ViolinSummary {
  std::string label;
  std::size_t n = 0;
  double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

// Quartiles are medians of the lower and upper halves, the overall median
// excluded when n is odd. A single observation gives q1 = q3 = that value.
inline ViolinSummary summarize_scores(std::string label, std::vector<double> v) {
  if (v.empty()) throw Error("violin summary of an empty narrative");
  std::ranges::sort(v);
  auto median = [](const double* p, std::size_t n) {
    return n % 2 ? p[n / 2] : 0.5 * (p[n / 2 - 1] + p[n / 2]);
  };
  ViolinSummary s;
  s.label = std::move(label);
  s.n = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.median = median(v.data(), v.size());
  s.min = v.front();
  s.max = v.back();
  const std::size_t half = v.size() / 2;
  if (half == 0) {
    s.q1 = s.q3 = v.front();
  } else {
    s.q1 = median(v.data(), half);
    s.q3 = median(v.data() + (v.size() - half), half);
  }
  return s;
}

inline std::vector<ViolinSummary> violin_summary(const std::map<std::string, std::uint32_t>& labels,
                                                 const std::map<std::string, double>& composites,
                                                 const LabelMap& map) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& [doc, k] : labels) {
    auto it = composites.find(doc);
    if (it == composites.end()) throw Error("violin_summary: no score for " + doc);
    groups[map.label(k)].push_back(it->second);
  }
  std::vector<ViolinSummary> out;
  for (auto& [label, scores] : groups) out.push_back(summarize_scores(label, std::move(scores)));
  return out;
}

// date, log_close, then <label>_mean and <label>_count per narrative. Rows
// cover every day with a price or a post; missing values stay blank.
inline void write_joined(std::ostream& out, const std::vector<NarrativeSeries>& series, const PriceSeries& prices) {
  std::vector<std::string> header{"date", "log_close"};
  for (const auto& s : series) {
    header.push_back(s.label + "_mean");
    header.push_back(s.label + "_count");
  }
  write_csv_row(out, header);

  std::set<Day> days;
  for (const auto& p : prices) days.insert(p.date);
  for (const auto& s : series)
    for (const auto& [d, st] : s.days) days.insert(d);

  std::vector<std::string> row;
  for (Day d : days) {
    row.clear();
    row.push_back(format_date(d));
    auto close = prices.close_on(d);
    row.push_back(close ? format_double(std::log(*close)) : std::string{});
    for (const auto& s : series) {
      auto it = s.days.find(d);
      if (it == s.days.end()) {
        row.emplace_back();
        row.emplace_back();
      } else {
        row.push_back(format_double(it->second.mean));
        row.push_back(std::to_string(it->second.count));
      }
    }
    write_csv_row(out, row);
  }
}

struct JoinedTable {
  std::map<Day, double> log_close;
  std::vector<NarrativeSeries> series;
};

inline JoinedTable read_joined(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(source + ": empty joined file");
  if (row.size() < 2 || row[0] != "date" || row[1] != "log_close" || row.size() % 2 != 0)
    throw ParseError(source, reader.line(), "unexpected joined header");
  JoinedTable t;
  for (std::size_t i = 2; i < row.size(); i += 2) {
    constexpr std::string_view kMean = "_mean";
    if (!row[i].ends_with(kMean)) throw ParseError(source, reader.line(), "bad column " + row[i]);
    t.series.push_back({row[i].substr(0, row[i].size() - kMean.size()), {}});
  }
  const std::size_t width = 2 + 2 * t.series.size();
  while (reader.next(row)) {
    if (row.size() != width) throw ParseError(source, reader.line(), "row width mismatch");
    auto d = parse_date(row[0]);
    if (!d) throw ParseError(source, reader.line(), "bad date");
    if (!row[1].empty()) {
      auto v = parse_double(row[1]);
      if (!v) throw ParseError(source, reader.line(), "bad log_close");
      t.log_close.emplace(*d, *v);
    }
    for (std::size_t s = 0; s < t.series.size(); ++s) {
      const auto& m = row[2 + 2 * s];
      const auto& c = row[3 + 2 * s];
      if (m.empty() && c.empty()) continue;
      auto mv = parse_double(m);
      auto cv = parse_int<std::size_t>(c);
      if (!mv || !cv) throw ParseError(source, reader.line(), "bad narrative cell");
      t.series[s].days.emplace(*d, DayStat{*mv, *cv});
    }
  }
  return t;
}

inline std::map<Day, double> log_close_by_day(const PriceSeries& prices) {
  std::map<Day, double> out;
  for (const auto& p : prices) out.emplace(p.date, std::log(p.close));
  return out;
}

}  // namespace narr
