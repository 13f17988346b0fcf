#pragma once

// Mean-shift break detection on log prices by penalized binary segmentation.
//
// Each segment's best split maximizes the drop in squared error around the
// segment mean. A split is taken when that drop exceeds
// penalty · σ̂² · ln(T), where σ̂ is a MAD estimate from first differences.
// Splits are taken best-first until max_breaks are reported or none qualify.
// Splits falling in the trimmed ends still partition the series but are
// never reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "narr/corpus.hpp"
#include "narr/csv.hpp"
#include "narr/date.hpp"
#include "narr/error.hpp"

namespace narr {

struct BreakOptions {
  double trim = 0.05;
  std::size_t min_seg = 20;
  std::size_t max_breaks = 12;
  double penalty = 1.0;
};

struct BreakResult {
  std::vector<std::size_t> indices;  // first sample of each new regime, ascending
  std::vector<Day> dates;            // same positions as dates (empty for bare signals)
  std::vector<double> criteria;      // error reduction achieved by each break
  std::vector<double> segment_means; // breaks + 1 entries
  double trim = 0.0;
  double sigma2 = 0.0;     // noise variance estimate
  double threshold = 0.0;  // minimum accepted error reduction

  std::size_t size() const { return indices.size(); }
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// Noise variance from the MAD of first differences; insensitive to a few level shifts.
inline double diff_noise_variance(std::span<const double> y) {
  if (y.size() < 3) return 0.0;
  std::vector<double> d(y.size() - 1);
  for (std::size_t i = 1; i < y.size(); ++i) d[i - 1] = y[i] - y[i - 1];
  const double med = median_of(d);
  for (double& x : d) x = std::abs(x - med);
  const double sigma = 1.482602218505602 * median_of(d) / std::sqrt(2.0);
  return sigma * sigma;
}

struct SplitCandidate {
  std::size_t begin, end;  // segment [begin, end)
  std::size_t at = 0;      // best split, 0 when none
  double gain = 0.0;
};

// Best split of y[begin, end) with both parts at least min_seg long.
inline SplitCandidate best_split(std::span<const double> y, std::size_t begin, std::size_t end,
                                 std::size_t min_seg) {
  SplitCandidate c{begin, end};
  const std::size_t n = end - begin;
  if (n < 2 * min_seg) return c;
  double lo = y[begin], hi = y[begin], sum = 0.0, sumsq = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    lo = std::min(lo, y[i]);
    hi = std::max(hi, y[i]);
    sum += y[i];
  }
  if (lo == hi) return c;
  const double mean = sum / static_cast<double>(n);
  for (std::size_t i = begin; i < end; ++i) sumsq += y[i] * y[i];
  // Reductions below this are rounding noise on an effectively flat segment.
  const double floor = 1e-18 * std::max(sumsq, static_cast<double>(n));

  // Gain of splitting before t is A² · n / (nL · nR), A = Σ_{begin..t-1} (y - mean).
  double a = 0.0;
  for (std::size_t t = begin + 1; t + min_seg <= end; ++t) {
    a += y[t - 1] - mean;
    const std::size_t nl = t - begin, nr = end - t;
    if (nl < min_seg) continue;
    const double g = a * a * static_cast<double>(n) / (static_cast<double>(nl) * static_cast<double>(nr));
    if (g > c.gain && g > floor) {
      c.gain = g;
      c.at = t;
    }
  }
  return c;
}

}  // namespace detail

inline BreakResult detect_breaks(std::span<const double> y, const BreakOptions& opts = {}) {
  if (!(opts.trim >= 0.0 && opts.trim < 0.5)) throw Error("break detection: trim must be in [0, 0.5)");
  if (opts.min_seg == 0) throw Error("break detection: min_seg must be positive");
  if (!(opts.penalty >= 0.0)) throw Error("break detection: penalty must be non-negative");
  const std::size_t T = y.size();
  if (T < 2 * opts.min_seg || T < 2) throw Error("break detection: series too short");

  BreakResult r;
  r.trim = opts.trim;
  r.sigma2 = detail::diff_noise_variance(y);
  r.threshold = opts.penalty * r.sigma2 * std::log(static_cast<double>(T));

  const auto trim_n = static_cast<std::size_t>(std::ceil(opts.trim * static_cast<double>(T) - 1e-9));
  auto reportable = [&](std::size_t t) { return t >= trim_n && t + trim_n <= T; };

  std::vector<detail::SplitCandidate> open{detail::best_split(y, 0, T, opts.min_seg)};
  std::vector<std::pair<std::size_t, double>> found;
  while (found.size() < opts.max_breaks) {
    auto best = open.end();
    for (auto it = open.begin(); it != open.end(); ++it) {
      if (it->at == 0 || !(it->gain > r.threshold)) continue;
      if (best == open.end() || it->gain > best->gain || (it->gain == best->gain && it->at < best->at)) best = it;
    }
    if (best == open.end()) break;
    auto c = *best;
    open.erase(best);
    if (reportable(c.at)) found.emplace_back(c.at, c.gain);
    open.push_back(detail::best_split(y, c.begin, c.at, opts.min_seg));
    open.push_back(detail::best_split(y, c.at, c.end, opts.min_seg));
  }

  std::ranges::sort(found);
  std::size_t start = 0;
  for (const auto& [at, gain] : found) {
    r.indices.push_back(at);
    r.criteria.push_back(gain);
  }
  for (std::size_t i = 0; i <= r.indices.size(); ++i) {
    const std::size_t stop = i < r.indices.size() ? r.indices[i] : T;
    double s = 0.0;
    for (std::size_t t = start; t < stop; ++t) s += y[t];
    r.segment_means.push_back(s / static_cast<double>(stop - start));
    start = stop;
  }
  return r;
}

// Runs on log(close); break dates are the first day of each new regime.
inline BreakResult detect_breaks(const PriceSeries& prices, const BreakOptions& opts = {}) {
  auto y = prices.log_closes();
  auto r = detect_breaks(std::span<const double>(y), opts);
  for (auto i : r.indices) r.dates.push_back(prices[i].date);
  return r;
}

struct DateWindow {
  Day start;
  Day end;  // inclusive
  friend bool operator==(const DateWindow&, const DateWindow&) = default;
};

struct WindowPlan {
  std::vector<DateWindow> windows;
  std::vector<std::pair<std::size_t, std::size_t>> overlaps;  // pairs of window indices
};

inline WindowPlan windows_around(std::span<const Day> breaks, int before_days, int after_days) {
  if (before_days < 0 || after_days < 0) throw Error("window sizes must be non-negative");
  WindowPlan plan;
  for (Day b : breaks)
    plan.windows.push_back({b - std::chrono::days{before_days}, b + std::chrono::days{after_days}});
  for (std::size_t i = 0; i < plan.windows.size(); ++i)
    for (std::size_t j = i + 1; j < plan.windows.size(); ++j)
      if (plan.windows[i].start <= plan.windows[j].end && plan.windows[j].start <= plan.windows[i].end)
        plan.overlaps.emplace_back(i, j);
  return plan;
}

inline WindowPlan windows_around(const BreakResult& breaks, int before_days, int after_days) {
  return windows_around(std::span<const Day>(breaks.dates), before_days, after_days);
}

inline void write_breaks_csv(std::ostream& out, const BreakResult& r) {
  out << "break_date,left_mean,right_mean,criterion\n";
  for (std::size_t i = 0; i < r.indices.size(); ++i) {
    std::string where = i < r.dates.size() ? format_date(r.dates[i]) : std::to_string(r.indices[i]);
    write_csv_row(out, {where, format_double(r.segment_means[i]), format_double(r.segment_means[i + 1]),
                        format_double(r.criteria[i])});
  }
}

inline void write_windows_csv(std::ostream& out, const WindowPlan& plan) {
  out << "start,end\n";
  for (const auto& w : plan.windows) write_csv_row(out, {format_date(w.start), format_date(w.end)});
}

}  // namespace narr
