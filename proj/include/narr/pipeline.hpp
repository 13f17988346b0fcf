#pragma once

// Batch pipeline stages behind the `narr` command line. Stages hand off
// through files in the output directory:
//
//   breaks      prices            -> breaks.csv, windows.csv
//   stopwords   posts             -> stopwords.txt, term_stats.csv
//   preprocess  posts, stopwords  -> corpus.jsonl
//   cluster     corpus.jsonl      -> model.json, labels.csv
//   sentiment   posts | scores    -> sentiment.csv
//   series      all of the above  -> joined.csv, summary.json
//
// Outputs depend only on the inputs and the configuration (seed included).
// Diagnostics go to the log stream, never into output files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "narr/breaks.hpp"
#include "narr/corpus.hpp"
#include "narr/csv.hpp"
#include "narr/error.hpp"
#include "narr/gsdmm.hpp"
#include "narr/preprocess.hpp"
#include "narr/sentiment.hpp"
#include "narr/series.hpp"
#include "narr/stopwords.hpp"

namespace narr {

namespace fs = std::filesystem;

struct PipelineConfig {
  // Inputs. Empty path = not given.
  fs::path posts;
  std::optional<PostFormat> posts_format;  // by extension when unset
  fs::path prices;
  fs::path scores;     // precomputed sentiment; lexicon scoring when empty
  fs::path stopwords;  // defaults to <out_dir>/stopwords.txt
  fs::path label_map;
  fs::path out_dir = "out";
  std::optional<Day> posts_from, posts_to;

  CleanOptions clean;
  double stopword_threshold = 0.4;
  std::vector<std::string> manual_stopwords;

  GsdmmConfig gsdmm;
  std::size_t top_n = 10;

  CompositeVariant variant = CompositeVariant::cs2;

  BreakOptions breaks;
  int window_before = 15;
  int window_after = 15;

  CorrelationMethod correlation = CorrelationMethod::pearson;
  std::size_t smooth_window = 1;

  unsigned threads = 1;

  // Sets one key; relative paths are resolved against base_dir.
  void set(std::string_view key, std::string_view value, const fs::path& base_dir = {});

  fs::path stopwords_path() const { return stopwords.empty() ? out_dir / "stopwords.txt" : stopwords; }
  PostFormat format_for_posts() const { return posts_format.value_or(post_format_for(posts)); }
};

namespace detail {

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  if constexpr (std::is_floating_point_v<T>) {
    if (auto d = parse_double(v)) return static_cast<T>(*d);
  } else {
    if (auto i = parse_int<T>(v)) return *i;
  }
  throw Error("config: bad value for " + std::string(key) + ": '" + std::string(v) + "'");
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  auto s = ascii_lower(CsvHeader::trim(v));
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw Error("config: bad boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= v.size()) {
    auto j = v.find(',', i);
    if (j == std::string_view::npos) j = v.size();
    auto item = CsvHeader::trim(v.substr(i, j - i));
    if (!item.empty()) out.push_back(std::move(item));
    i = j + 1;
  }
  return out;
}

}  // namespace detail

inline void PipelineConfig::set(std::string_view key, std::string_view raw, const fs::path& base_dir) {
  const std::string value = CsvHeader::trim(raw);
  auto path = [&] {
    fs::path p(value);
    return (p.empty() || p.is_absolute() || base_dir.empty()) ? p : base_dir / p;
  };
  auto date = [&] {
    auto d = parse_date(value);
    if (!d) throw Error("config: bad date for " + std::string(key));
    return *d;
  };
  using detail::parse_number;

  if (key == "posts") posts = path();
  else if (key == "posts_format") {
    auto f = parse_post_format(value);
    if (!f) throw Error("config: posts_format must be csv or jsonl");
    posts_format = f;
  } else if (key == "prices") prices = path();
  else if (key == "scores") scores = path();
  else if (key == "stopwords") stopwords = path();
  else if (key == "label_map") label_map = path();
  else if (key == "out_dir") out_dir = path();
  else if (key == "posts_from") posts_from = date();
  else if (key == "posts_to") posts_to = date();
  else if (key == "seed") gsdmm.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") threads = parse_number<unsigned>(key, value);
  else if (key == "preprocess.keep_hashtag_word") clean.keep_hashtag_word = detail::parse_bool(key, value);
  else if (key == "stopwords.threshold") stopword_threshold = parse_number<double>(key, value);
  else if (key == "stopwords.manual") manual_stopwords = detail::split_list(value);
  else if (key == "gsdmm.k_max") gsdmm.k_max = parse_number<std::size_t>(key, value);
  else if (key == "gsdmm.alpha") gsdmm.alpha = parse_number<double>(key, value);
  else if (key == "gsdmm.beta") gsdmm.beta = parse_number<double>(key, value);
  else if (key == "gsdmm.iters") gsdmm.n_iters = parse_number<std::size_t>(key, value);
  else if (key == "gsdmm.top_n") top_n = parse_number<std::size_t>(key, value);
  else if (key == "sentiment.variant") {
    auto v = parse_variant(value);
    if (!v) throw Error("config: sentiment.variant must be cs1 or cs2");
    variant = *v;
  } else if (key == "breaks.trim") breaks.trim = parse_number<double>(key, value);
  else if (key == "breaks.min_seg") breaks.min_seg = parse_number<std::size_t>(key, value);
  else if (key == "breaks.max_breaks") breaks.max_breaks = parse_number<std::size_t>(key, value);
  else if (key == "breaks.penalty") breaks.penalty = parse_number<double>(key, value);
  else if (key == "windows.before") window_before = parse_number<int>(key, value);
  else if (key == "windows.after") window_after = parse_number<int>(key, value);
  else if (key == "series.correlation") {
    auto m = parse_correlation(value);
    if (!m) throw Error("config: series.correlation must be pearson or spearman");
    correlation = *m;
  } else if (key == "series.smooth_window") smooth_window = parse_number<std::size_t>(key, value);
  else throw Error("config: unknown key '" + std::string(key) + "'");
}

// Flat `key = value` lines; '#' comments. Relative paths resolve against
// the file's own directory.
inline void apply_config(PipelineConfig& cfg, std::istream& in, const std::string& source,
                         const fs::path& base_dir = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = CsvHeader::trim(line);
    if (!t.empty() && t.back() == '\r') t.pop_back();
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
    try {
      cfg.set(CsvHeader::trim(t.substr(0, eq)), t.substr(eq + 1), base_dir);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
}

inline void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config " + path.string());
  apply_config(cfg, in, path.string(), path.parent_path());
}

namespace detail {

inline const fs::path& require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(std::string("no ") + what + " path configured");
  if (!fs::exists(p)) throw Error(std::string(what) + " file not found: " + p.string());
  return p;
}

inline std::ofstream open_output(const fs::path& out_dir, const char* name) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (out_dir / name).string());
  return out;
}

inline void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

inline std::vector<RawPost> load_deduped_posts(const PipelineConfig& cfg, std::ostream& log) {
  LoadOptions opts{cfg.posts_from, cfg.posts_to};
  auto loaded = load_posts(require_path(cfg.posts, "posts"), cfg.format_for_posts(), opts);
  auto posts = dedup(loaded.posts);
  log << "posts: " << loaded.posts.size() << " loaded, " << loaded.dropped.total() << " dropped ("
      << loaded.dropped.empty_text << " empty text, " << loaded.dropped.bad_timestamp << " bad timestamp, "
      << loaded.dropped.missing_id << " missing id, " << loaded.dropped.duplicate_id << " duplicate id, "
      << loaded.dropped.out_of_window << " outside window), " << (loaded.posts.size() - posts.size())
      << " duplicate texts removed\n";
  return posts;
}

inline StopwordSet load_required_stopwords(const PipelineConfig& cfg) {
  auto p = cfg.stopwords_path();
  if (!fs::exists(p)) throw Error("stopword file not found: " + p.string() + " (run `narr stopwords` first)");
  return load_stopwords(p);
}

}  // namespace detail

inline BreakResult cmd_breaks(const PipelineConfig& cfg, std::ostream& log) {
  auto prices = load_prices(detail::require_path(cfg.prices, "prices"));
  auto result = detect_breaks(prices, cfg.breaks);
  auto plan = windows_around(result, cfg.window_before, cfg.window_after);
  {
    auto out = detail::open_output(cfg.out_dir, "breaks.csv");
    write_breaks_csv(out, result);
    detail::finish_output(out, cfg.out_dir / "breaks.csv");
  }
  {
    auto out = detail::open_output(cfg.out_dir, "windows.csv");
    write_windows_csv(out, plan);
    detail::finish_output(out, cfg.out_dir / "windows.csv");
  }
  log << "breaks: " << result.size() << " found in " << prices.size() << " days\n";
  for (auto [i, j] : plan.overlaps)
    log << "warning: windows around " << format_date(result.dates[i]) << " and " << format_date(result.dates[j])
        << " overlap\n";
  return result;
}

inline StopwordSet cmd_stopwords(const PipelineConfig& cfg, std::ostream& log) {
  auto posts = detail::load_deduped_posts(cfg, log);
  std::vector<std::vector<std::string>> docs;
  for (const auto& p : posts) {
    auto toks = tokenize(clean(p.text, cfg.clean));
    if (!toks.empty()) docs.push_back(std::move(toks));
  }
  auto set = discover_stopwords(docs, cfg.stopword_threshold, cfg.manual_stopwords);
  {
    auto out = detail::open_output(cfg.out_dir, "stopwords.txt");
    write_stopwords(out, set);
    detail::finish_output(out, cfg.out_dir / "stopwords.txt");
  }
  {
    auto stats = term_stats(docs);
    std::ranges::stable_sort(stats, std::greater<>{}, &TermStats::df);
    auto out = detail::open_output(cfg.out_dir, "term_stats.csv");
    out << "term,df,mean_tfidf\n";
    for (const auto& s : stats) write_csv_row(out, {s.term, std::to_string(s.df), format_double(s.mean_tfidf)});
    detail::finish_output(out, cfg.out_dir / "term_stats.csv");
  }
  std::size_t flagged = 0;
  for (const auto& [t, p] : set.entries()) {
    if (p != Provenance::tfidf) continue;
    ++flagged;
    log << "stopwords: flagged '" << t << "'\n";
  }
  log << "stopwords: " << set.size() << " total, " << flagged << " discovered over " << docs.size() << " docs\n";
  return set;
}

inline std::size_t cmd_preprocess(const PipelineConfig& cfg, std::ostream& log) {
  auto posts = detail::load_deduped_posts(cfg, log);
  auto stop = detail::load_required_stopwords(cfg);
  Vocabulary vocab;
  auto result = preprocess_corpus(posts, stop, vocab, cfg.clean, cfg.threads);
  auto out = detail::open_output(cfg.out_dir, "corpus.jsonl");
  write_corpus_jsonl(out, result.docs, vocab);
  detail::finish_output(out, cfg.out_dir / "corpus.jsonl");
  log << "preprocess: " << result.docs.size() << " documents, " << result.dropped << " empty after cleaning, "
      << vocab.size() << " distinct stems\n";
  return result.docs.size();
}

inline FitResult cmd_cluster(const PipelineConfig& cfg, std::ostream& log) {
  Vocabulary vocab;
  auto docs = load_corpus(detail::require_path(cfg.out_dir / "corpus.jsonl", "corpus"), vocab);
  auto result = fit(docs, vocab.size(), cfg.gsdmm);
  {
    auto out = detail::open_output(cfg.out_dir, "model.json");
    out << model_json(result, docs, vocab, cfg.gsdmm, cfg.top_n).dump(2) << '\n';
    detail::finish_output(out, cfg.out_dir / "model.json");
  }
  {
    auto out = detail::open_output(cfg.out_dir, "labels.csv");
    write_labels_csv(out, docs, result.state);
    detail::finish_output(out, cfg.out_dir / "labels.csv");
  }
  log << "cluster: " << docs.size() << " docs, " << result.state.non_empty_clusters() << " non-empty clusters after "
      << cfg.gsdmm.n_iters << " iterations\n";
  return result;
}

inline void write_sentiment_row(std::ostream& out, const std::string& id, const SentimentProbs& p,
                                CompositeVariant v) {
  write_csv_row(out, {id, format_double(p.pos()), format_double(p.neg()), format_double(p.neu()),
                      format_double(composite(p, v).value), std::string(to_string(label(p)))});
}

inline std::size_t cmd_sentiment(const PipelineConfig& cfg, std::ostream& log) {
  std::vector<std::pair<std::string, SentimentProbs>> rows;
  if (!cfg.scores.empty()) {
    auto scores = load_scores(detail::require_path(cfg.scores, "scores"));
    rows.assign(scores.begin(), scores.end());
    log << "sentiment: " << rows.size() << " precomputed scores validated\n";
  } else {
    auto posts = detail::load_deduped_posts(cfg, log);
    auto stop = detail::load_required_stopwords(cfg);
    for (const auto& p : posts) rows.emplace_back(p.id, lexicon_score(content_tokens(p.text, stop, cfg.clean)));
    log << "sentiment: " << rows.size() << " posts scored with the embedded lexicon\n";
  }
  auto out = detail::open_output(cfg.out_dir, "sentiment.csv");
  out << "doc_id,pos,neg,neu,composite,label\n";
  for (const auto& [id, p] : rows) write_sentiment_row(out, id, p, cfg.variant);
  detail::finish_output(out, cfg.out_dir / "sentiment.csv");
  return rows.size();
}

inline nlohmann::json violin_json(const ViolinSummary& v) {
  return {{"n", v.n}, {"mean", v.mean}, {"median", v.median}, {"q1", v.q1},
          {"q3", v.q3}, {"min", v.min}, {"max", v.max}};
}

inline std::vector<NarrativeSeries> cmd_series(const PipelineConfig& cfg, std::ostream& log) {
  std::map<std::string, std::uint32_t> labels;
  {
    auto p = detail::require_path(cfg.out_dir / "labels.csv", "labels");
    std::ifstream in(p, std::ios::binary);
    labels = read_labels_csv(in, p.string());
  }
  auto scores = load_scores(detail::require_path(cfg.out_dir / "sentiment.csv", "sentiment"));
  std::map<std::string, Day> days;
  {
    Vocabulary vocab;
    for (const auto& d : load_corpus(detail::require_path(cfg.out_dir / "corpus.jsonl", "corpus"), vocab))
      days.emplace(d.doc_id, d.day);
  }
  auto prices = load_prices(detail::require_path(cfg.prices, "prices"));
  LabelMap map;
  if (!cfg.label_map.empty()) map = load_label_map(detail::require_path(cfg.label_map, "label map"));

  std::map<std::string, double> composites;
  for (const auto& [id, k] : labels) {
    auto it = scores.find(id);
    if (it == scores.end()) throw Error("series: no sentiment score for document " + id);
    composites.emplace(id, composite(it->second, cfg.variant).value);
  }
  if (days.size() != labels.size()) throw Error("series: labels.csv and corpus.jsonl disagree");

  auto series = build_series(labels, composites, days, map);
  if (cfg.smooth_window > 1)
    for (auto& s : series) s = smooth(s, cfg.smooth_window);
  auto violins = violin_summary(labels, composites, map);

  {
    auto out = detail::open_output(cfg.out_dir, "joined.csv");
    write_joined(out, series, prices);
    detail::finish_output(out, cfg.out_dir / "joined.csv");
  }

  auto price_by_day = log_close_by_day(prices);
  std::map<std::string, std::vector<std::uint32_t>> clusters_of;
  for (const auto& [id, k] : labels) {
    auto& v = clusters_of[map.label(k)];
    if (std::ranges::find(v, k) == v.end()) v.push_back(k);
  }
  nlohmann::json summary;
  summary["sentiment_variant"] = to_string(cfg.variant);
  summary["correlation_method"] = cfg.correlation == CorrelationMethod::pearson ? "pearson" : "spearman";
  summary["smooth_window"] = cfg.smooth_window;
  auto& narratives = summary["narratives"] = nlohmann::json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    auto cl = clusters_of[s.label];
    std::ranges::sort(cl);
    nlohmann::json n;
    n["label"] = s.label;
    n["clusters"] = cl;
    n["posts"] = s.total_posts();
    n["days"] = s.days.size();
    n["violin"] = violin_json(violins[i]);
    try {
      n["correlation_with_log_close"] = correlate(s.means(), price_by_day, cfg.correlation);
    } catch (const Error& e) {
      n["correlation_with_log_close"] = nullptr;
      log << "warning: correlation omitted for " << s.label << ": " << e.what() << '\n';
    }
    narratives.push_back(std::move(n));
  }
  {
    auto out = detail::open_output(cfg.out_dir, "summary.json");
    out << summary.dump(2) << '\n';
    detail::finish_output(out, cfg.out_dir / "summary.json");
  }
  log << "series: " << series.size() << " narratives over " << composites.size() << " posts\n";
  return series;
}

// All stages in order.
inline void cmd_run(const PipelineConfig& cfg, std::ostream& log) {
  cmd_breaks(cfg, log);
  cmd_stopwords(cfg, log);
  cmd_preprocess(cfg, log);
  cmd_cluster(cfg, log);
  cmd_sentiment(cfg, log);
  cmd_series(cfg, log);
}

}  // namespace narr
