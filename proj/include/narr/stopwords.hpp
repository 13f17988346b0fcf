#pragma once

// TF-IDF statistics and stopword-set construction.
//
// idf(t) = max(0, ln(N / (df(t) + 1))). The +1 keeps the ratio defined for
// unseen terms; the clamp makes ubiquitous terms score exactly zero instead of
// going negative once df >= N.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <ranges>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "narr/data/english_stopwords.hpp"
#include "narr/error.hpp"

namespace narr {

template <class Doc>
concept TokenRange = std::ranges::forward_range<Doc>;

template <class Corpus>
concept TokenCorpus = std::ranges::forward_range<Corpus> && TokenRange<std::ranges::range_value_t<Corpus>>;

template <TokenRange Doc>
using token_t = std::ranges::range_value_t<Doc>;

// Share of the document's tokens equal to term. An empty document yields 0.
template <TokenRange Doc, class Term>
double tf(const Term& term, const Doc& doc) {
  std::size_t n = 0, hits = 0;
  for (const auto& t : doc) {
    ++n;
    if (t == term) ++hits;
  }
  return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

inline double idf_from_counts(std::size_t n_docs, std::size_t df) {
  double v = std::log(static_cast<double>(n_docs) / static_cast<double>(df + 1));
  return v > 0.0 ? v : 0.0;
}

// Per-term document counts over a corpus.
template <class Token>
class DocumentFrequency {
 public:
  DocumentFrequency() = default;

  template <TokenCorpus Corpus>
  explicit DocumentFrequency(const Corpus& corpus) {
    std::unordered_set<Token> seen;
    for (const auto& doc : corpus) {
      ++n_docs_;
      seen.clear();
      for (const auto& t : doc)
        if (seen.insert(t).second) ++df_[t];
    }
  }

  std::size_t n_docs() const { return n_docs_; }

  std::size_t df(const Token& t) const {
    auto it = df_.find(t);
    return it == df_.end() ? 0 : it->second;
  }

  double idf(const Token& t) const { return idf_from_counts(n_docs_, df(t)); }

  const std::unordered_map<Token, std::size_t>& counts() const { return df_; }

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<Token, std::size_t> df_;
};

template <TokenCorpus Corpus>
DocumentFrequency<token_t<std::ranges::range_value_t<Corpus>>> document_frequency(const Corpus& corpus) {
  return DocumentFrequency<token_t<std::ranges::range_value_t<Corpus>>>(corpus);
}

template <TokenCorpus Corpus, class Term>
double idf(const Term& term, const Corpus& corpus) {
  std::size_t n = 0, df = 0;
  for (const auto& doc : corpus) {
    ++n;
    if (std::ranges::find(doc, term) != std::ranges::end(doc)) ++df;
  }
  if (n == 0) throw Error("idf: empty corpus");
  return idf_from_counts(n, df);
}

template <TokenRange Doc, class Token>
double tfidf(const Token& term, const Doc& doc, const DocumentFrequency<Token>& stats) {
  return tf(term, doc) * stats.idf(term);
}

template <TokenCorpus Corpus, TokenRange Doc, class Term>
double tfidf(const Term& term, const Doc& doc, const Corpus& corpus) {
  return tf(term, doc) * idf(term, corpus);
}

struct TermStats {
  std::string term;
  std::size_t df = 0;
  double mean_tfidf = 0.0;  // averaged over the documents that contain the term
};

// Stats for every term of a string-token corpus, sorted by term.
template <TokenCorpus Corpus>
std::vector<TermStats> term_stats(const Corpus& corpus) {
  std::unordered_map<std::string, std::pair<std::size_t, double>> acc;  // df, sum of tf
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t n_docs = 0;
  for (const auto& doc : corpus) {
    ++n_docs;
    counts.clear();
    std::size_t len = 0;
    for (const auto& t : doc) {
      ++counts[std::string(t)];
      ++len;
    }
    for (const auto& [t, c] : counts) {
      auto& a = acc[t];
      ++a.first;
      a.second += static_cast<double>(c) / static_cast<double>(len);
    }
  }
  std::vector<TermStats> out;
  out.reserve(acc.size());
  for (const auto& [t, a] : acc)
    out.push_back({t, a.first, idf_from_counts(n_docs, a.first) * a.second / static_cast<double>(a.first)});
  std::ranges::sort(out, {}, &TermStats::term);
  return out;
}

enum class Provenance { base, manual, tfidf };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::base: return "base";
    case Provenance::manual: return "manual";
    case Provenance::tfidf: return "tfidf";
  }
  return "?";
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "base") return Provenance::base;
  if (s == "manual") return Provenance::manual;
  if (s == "tfidf") return Provenance::tfidf;
  return std::nullopt;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Lowercase tokens, each tagged with where it came from. The first
// provenance a token is added with wins.
class StopwordSet {
 public:
  static StopwordSet english() {
    StopwordSet s;
    for (auto w : data::kEnglishStopwords) s.add(w, Provenance::base);
    return s;
  }

  bool add(std::string_view token, Provenance p) {
    auto t = ascii_lower(token);
    if (t.empty()) return false;
    return entries_.emplace(std::move(t), p).second;
  }

  // Lookup is exact; callers pass already-lowercased tokens.
  bool contains(std::string_view token) const { return entries_.find(token) != entries_.end(); }

  std::optional<Provenance> provenance(std::string_view token) const {
    auto it = entries_.find(token);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Provenance, std::less<>>& entries() const { return entries_; }

  friend bool operator==(const StopwordSet&, const StopwordSet&) = default;

 private:
  std::map<std::string, Provenance, std::less<>> entries_;
};

// Base list + manual additions + every term whose document ratio df/N reaches
// df_ratio_threshold.
template <TokenCorpus Corpus>
StopwordSet discover_stopwords(const Corpus& corpus, double df_ratio_threshold,
                               const std::vector<std::string>& manual) {
  if (!(df_ratio_threshold > 0.0 && df_ratio_threshold <= 1.0))
    throw Error("stopword threshold must be in (0, 1]");
  DocumentFrequency<std::string> stats;
  {
    std::vector<std::vector<std::string>> owned;
    for (const auto& doc : corpus) {
      auto& d = owned.emplace_back();
      for (const auto& t : doc) d.emplace_back(t);
    }
    stats = DocumentFrequency<std::string>(owned);
  }
  if (stats.n_docs() == 0) throw Error("cannot discover stopwords on an empty corpus");

  StopwordSet out = StopwordSet::english();
  for (const auto& m : manual) out.add(m, Provenance::manual);

  std::vector<std::string> flagged;
  const auto n = static_cast<double>(stats.n_docs());
  for (const auto& [term, df] : stats.counts())
    if (static_cast<double>(df) / n >= df_ratio_threshold) flagged.push_back(term);
  std::ranges::sort(flagged);
  for (const auto& t : flagged) out.add(t, Provenance::tfidf);
  return out;
}

// Plain text, one token per line, grouped under "# provenance: <tag>" lines.
inline void write_stopwords(std::ostream& out, const StopwordSet& set) {
  for (auto p : {Provenance::base, Provenance::manual, Provenance::tfidf}) {
    bool header = false;
    for (const auto& [tok, prov] : set.entries()) {
      if (prov != p) continue;
      if (!header) {
        out << "# provenance: " << to_string(p) << '\n';
        header = true;
      }
      out << tok << '\n';
    }
  }
}

inline StopwordSet read_stopwords(std::istream& in, const std::string& source) {
  StopwordSet set;
  Provenance current = Provenance::manual;
  std::string line;
  std::size_t lineno = 0;
  constexpr std::string_view kTag = "# provenance:";
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::string_view s(line);
    s.remove_prefix(b);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.starts_with(kTag)) {
      auto tag = s.substr(kTag.size());
      while (!tag.empty() && tag.front() == ' ') tag.remove_prefix(1);
      auto p = parse_provenance(tag);
      if (!p) throw ParseError(source, lineno, "unknown provenance '" + std::string(tag) + "'");
      current = *p;
      continue;
    }
    if (s.front() == '#') continue;
    set.add(s, current);
  }
  return set;
}

inline void save_stopwords(const std::filesystem::path& path, const StopwordSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_stopwords(out, set);
  if (!out) throw Error("write failed: " + path.string());
}

inline StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_stopwords(in, path.string());
}

}  // namespace narr
