#pragma once

// Post text -> stemmed token document.
//
// Cleaning runs these stages in order, each replacing its matches with a
// single space:
//   1. links          (?:https?://|www\.)\S*      case-insensitive
//   2. user handles   @\w+
//   3. hashtags       #\w+                         (or just the '#' with keep_hashtag_word)
//   4. media tags     <[^<>]*>  then  \[(?:audio|video|photo|gif)\]  case-insensitive
// then lowercases, turns every byte outside [a-z] into a space, drops
// one-letter words and collapses whitespace. \w is [A-Za-z0-9_].

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "narr/corpus.hpp"
#include "narr/date.hpp"
#include "narr/porter.hpp"
#include "narr/stopwords.hpp"

namespace narr {

struct CleanOptions {
  bool keep_hashtag_word = false;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline bool is_word(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool starts_with_icase(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (lower(s[pos + i]) != prefix[i]) return false;
  return true;
}

// Generic left-to-right replace: `match(s, i)` returns the match length at i (0 = none).
template <class Matcher>
std::string replace_matches(std::string_view s, Matcher&& match) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t n = match(s, i, out);
    if (n == 0) {
      out.push_back(s[i]);
      ++i;
    } else {
      i += n;
    }
  }
  return out;
}

inline std::string strip_links(std::string_view s) {
  return replace_matches(s, [](std::string_view t, std::size_t i, std::string& out) -> std::size_t {
    std::size_t start;
    if (starts_with_icase(t, i, "http://"))
      start = i + 7;
    else if (starts_with_icase(t, i, "https://"))
      start = i + 8;
    else if (starts_with_icase(t, i, "www."))
      start = i + 4;
    else
      return 0;
    while (start < t.size() && !is_space(t[start])) ++start;
    out.push_back(' ');
    return start - i;
  });
}

// '@' or '#' followed by at least one word character.
inline std::string strip_marked_words(std::string_view s, char mark, bool keep_word) {
  return replace_matches(s, [=](std::string_view t, std::size_t i, std::string& out) -> std::size_t {
    if (t[i] != mark || i + 1 >= t.size() || !is_word(t[i + 1])) return 0;
    std::size_t j = i + 1;
    while (j < t.size() && is_word(t[j])) ++j;
    out.push_back(' ');
    if (keep_word) {
      out.append(t.substr(i + 1, j - i - 1));
      out.push_back(' ');
    }
    return j - i;
  });
}

inline std::string strip_media_tags(std::string_view s) {
  std::string pass = replace_matches(s, [](std::string_view t, std::size_t i, std::string& out) -> std::size_t {
    if (t[i] != '<') return 0;
    std::size_t j = i + 1;
    while (j < t.size() && t[j] != '<' && t[j] != '>') ++j;
    if (j >= t.size() || t[j] != '>') return 0;
    out.push_back(' ');
    return j - i + 1;
  });
  return replace_matches(pass, [](std::string_view t, std::size_t i, std::string& out) -> std::size_t {
    if (t[i] != '[') return 0;
    for (std::string_view tag : {"[audio]", "[video]", "[photo]", "[gif]"}) {
      if (starts_with_icase(t, i, tag)) {
        out.push_back(' ');
        return tag.size();
      }
    }
    return 0;
  });
}

}  // namespace detail

inline std::string clean(std::string_view text, const CleanOptions& opts = {}) {
  std::string s = detail::strip_links(text);
  s = detail::strip_marked_words(s, '@', false);
  s = detail::strip_marked_words(s, '#', opts.keep_hashtag_word);
  s = detail::strip_media_tags(s);

  for (char& c : s) {
    c = detail::lower(c);
    if (c < 'a' || c > 'z') c = ' ';
  }

  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j - i >= 2) {
      if (!out.empty()) out.push_back(' ');
      out.append(s, i, j - i);
    }
    i = j;
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !detail::is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string stem(std::string_view token) { return porter_stem(token); }

// Cleaned, tokenized, stopword-filtered tokens before stemming.
inline std::vector<std::string> content_tokens(std::string_view text, const StopwordSet& stopwords,
                                               const CleanOptions& opts = {}) {
  auto tokens = tokenize(clean(text, opts));
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

// The whole text stage as a pure function: clean, tokenize, drop stopwords, stem.
inline std::vector<std::string> analyze(std::string_view text, const StopwordSet& stopwords,
                                        const CleanOptions& opts = {}) {
  auto tokens = content_tokens(text, stopwords, opts);
  for (auto& t : tokens) t = stem(t);
  return tokens;
}

struct WordCount {
  TokenId word;
  std::uint32_t count;
  friend bool operator==(const WordCount&, const WordCount&) = default;
};

// A preprocessed post. Iterating a TokenDoc yields its token ids.
struct TokenDoc {
  std::string doc_id;
  Day day;
  std::vector<TokenId> tokens;

  std::size_t size() const { return tokens.size(); }
  auto begin() const { return tokens.begin(); }
  auto end() const { return tokens.end(); }

  friend bool operator==(const TokenDoc&, const TokenDoc&) = default;
};

// Per-word multiplicities of a document, ordered by token id.
inline std::vector<WordCount> word_counts(const TokenDoc& doc) {
  std::vector<TokenId> sorted = doc.tokens;
  std::ranges::sort(sorted);
  std::vector<WordCount> out;
  for (TokenId t : sorted) {
    if (!out.empty() && out.back().word == t)
      ++out.back().count;
    else
      out.push_back({t, 1});
  }
  return out;
}

inline std::optional<TokenDoc> pipeline(const RawPost& post, const StopwordSet& stopwords, Vocabulary& vocab,
                                        const CleanOptions& opts = {}) {
  auto tokens = analyze(post.text, stopwords, opts);
  if (tokens.empty()) return std::nullopt;
  TokenDoc doc{post.id, post.day(), {}};
  doc.tokens.reserve(tokens.size());
  for (const auto& t : tokens) doc.tokens.push_back(vocab.add(t));
  return doc;
}

struct PreprocessResult {
  std::vector<TokenDoc> docs;
  std::size_t dropped = 0;  // posts with no surviving tokens
};

// Text analysis fans out over `threads` workers; vocabulary ids are then
// assigned serially in post order, so the result does not depend on threads.
inline PreprocessResult preprocess_corpus(const std::vector<RawPost>& posts, const StopwordSet& stopwords,
                                          Vocabulary& vocab, const CleanOptions& opts = {},
                                          unsigned threads = 1) {
  std::vector<std::vector<std::string>> analyzed(posts.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(posts.size() / 64 + 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < posts.size(); ++i) analyzed[i] = analyze(posts[i].text, stopwords, opts);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (posts.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      std::size_t lo = w * chunk, hi = std::min(posts.size(), lo + chunk);
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) analyzed[i] = analyze(posts[i].text, stopwords, opts);
      });
    }
  }

  PreprocessResult out;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (analyzed[i].empty()) {
      ++out.dropped;
      continue;
    }
    TokenDoc doc{posts[i].id, posts[i].day(), {}};
    doc.tokens.reserve(analyzed[i].size());
    for (const auto& t : analyzed[i]) doc.tokens.push_back(vocab.add(t));
    out.docs.push_back(std::move(doc));
  }
  return out;
}

// Audit format: one {"doc_id", "day", "tokens"} object per line.
inline void write_corpus_jsonl(std::ostream& out, const std::vector<TokenDoc>& docs, const Vocabulary& vocab) {
  for (const auto& d : docs) {
    nlohmann::json j;
    j["doc_id"] = d.doc_id;
    j["day"] = format_date(d.day);
    auto& toks = j["tokens"] = nlohmann::json::array();
    for (TokenId t : d.tokens) toks.push_back(vocab.token(t));
    out << j.dump() << '\n';
  }
}

inline std::vector<TokenDoc> read_corpus_jsonl(std::istream& in, Vocabulary& vocab, const std::string& source) {
  std::vector<TokenDoc> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(source, lineno, "not a JSON object");
    try {
      auto day = parse_date(j.at("day").get<std::string>());
      if (!day) throw ParseError(source, lineno, "bad day");
      TokenDoc d{j.at("doc_id").get<std::string>(), *day, {}};
      for (const auto& t : j.at("tokens")) d.tokens.push_back(vocab.add(t.get<std::string>()));
      if (d.tokens.empty()) throw ParseError(source, lineno, "document has no tokens");
      docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return docs;
}

inline void save_corpus(const std::filesystem::path& path, const std::vector<TokenDoc>& docs,
                        const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_corpus_jsonl(out, docs, vocab);
}

inline std::vector<TokenDoc> load_corpus(const std::filesystem::path& path, Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_corpus_jsonl(in, vocab, path.string());
}

}  // namespace narr
