#pragma once

// Per-post sentiment: three-way probabilities and the composite score
//
//   C = (pos - neg) · (1 + F(neu)),   F = identity (cs1) or sqrt (cs2),
//
// clamped to [-1, 1]. The cs2 form peaks at 32/27 at (8/9, 0, 1/9) before
// clamping, so the clamp is what keeps C inside its nominal range.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "narr/csv.hpp"
#include "narr/data/sentiment_lexicon.hpp"
#include "narr/error.hpp"

namespace narr {

inline constexpr double kProbSumTolerance = 5e-3;

class SentimentProbs {
 public:
  // Validates non-negativity and |sum - 1| <= 5e-3, then renormalizes.
  static SentimentProbs from(double pos, double neg, double neu) {
    if (!std::isfinite(pos) || !std::isfinite(neg) || !std::isfinite(neu))
      throw Error("sentiment probabilities must be finite");
    if (pos < 0 || neg < 0 || neu < 0) throw Error("sentiment probabilities must be non-negative");
    const double sum = pos + neg + neu;
    if (std::abs(sum - 1.0) > kProbSumTolerance)
      throw Error("sentiment probabilities sum to " + format_double(sum) + ", expected 1");
    return SentimentProbs(pos / sum, neg / sum, neu / sum);
  }

  double pos() const { return pos_; }
  double neg() const { return neg_; }
  double neu() const { return neu_; }

  friend bool operator==(const SentimentProbs&, const SentimentProbs&) = default;

 private:
  SentimentProbs(double p, double n, double u) : pos_(p), neg_(n), neu_(u) {}
  double pos_, neg_, neu_;
};

enum class CompositeVariant { cs1, cs2 };

inline std::string_view to_string(CompositeVariant v) { return v == CompositeVariant::cs1 ? "cs1" : "cs2"; }

inline std::optional<CompositeVariant> parse_variant(std::string_view s) {
  if (s == "cs1") return CompositeVariant::cs1;
  if (s == "cs2") return CompositeVariant::cs2;
  return std::nullopt;
}

struct CompositeScore {
  double value;  // in [-1, 1]
  CompositeVariant variant;
};

// Unclamped (pos - neg)(1 + F(neu)).
inline double composite_raw(double pos, double neg, double neu, CompositeVariant v) {
  const double f = v == CompositeVariant::cs1 ? neu : std::sqrt(neu);
  return (pos - neg) * (1.0 + f);
}

inline CompositeScore composite(const SentimentProbs& p, CompositeVariant v = CompositeVariant::cs2) {
  return {std::clamp(composite_raw(p.pos(), p.neg(), p.neu(), v), -1.0, 1.0), v};
}

enum class SentimentLabel { pos, neg, neu };

inline std::string_view to_string(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::pos: return "POS";
    case SentimentLabel::neg: return "NEG";
    case SentimentLabel::neu: return "NEU";
  }
  return "?";
}

// Argmax; ties go NEU, then POS, then NEG.
inline SentimentLabel label(const SentimentProbs& p) {
  if (p.neu() >= p.pos() && p.neu() >= p.neg()) return SentimentLabel::neu;
  if (p.pos() >= p.neg()) return SentimentLabel::pos;
  return SentimentLabel::neg;
}

// Word-list scorer used when no external probabilities are supplied.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::span<const std::string_view> positive, std::span<const std::string_view> negative) {
    for (auto w : positive) positive_.emplace(w);
    for (auto w : negative) negative_.emplace(w);
  }

  static const Lexicon& embedded() {
    static const Lexicon lex(data::kPositiveWords, data::kNegativeWords);
    return lex;
  }

  bool is_positive(std::string_view w) const { return positive_.contains(std::string(w)); }
  bool is_negative(std::string_view w) const { return negative_.contains(std::string(w)); }

  // pos = p/(p+n+1), neg = n/(p+n+1), neu = the rest.
  template <class Tokens>
  SentimentProbs score(const Tokens& tokens) const {
    std::size_t p = 0, n = 0;
    for (const auto& t : tokens) {
      if (is_positive(t)) ++p;
      else if (is_negative(t)) ++n;
    }
    const double denom = static_cast<double>(p + n + 1);
    const double pos = static_cast<double>(p) / denom;
    const double neg = static_cast<double>(n) / denom;
    return SentimentProbs::from(pos, neg, 1.0 - pos - neg);
  }

 private:
  std::unordered_set<std::string> positive_;
  std::unordered_set<std::string> negative_;
};

template <class Tokens>
SentimentProbs lexicon_score(const Tokens& tokens) {
  return Lexicon::embedded().score(tokens);
}

// CSV with header doc_id,pos,neg,neu (extra columns ignored).
inline std::map<std::string, SentimentProbs> read_scores(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(source + ": empty scores file");
  CsvHeader header(row);
  auto id = header.find("doc_id");
  auto pos = header.find("pos");
  auto neg = header.find("neg");
  auto neu = header.find("neu");
  if (!id || !pos || !neg || !neu) throw ParseError(source, reader.line(), "expected header doc_id,pos,neg,neu");
  const std::size_t width = std::max({*id, *pos, *neg, *neu});

  std::map<std::string, SentimentProbs> out;
  while (reader.next(row)) {
    if (row.size() <= width) throw ParseError(source, reader.line(), "short row");
    auto p = parse_double(row[*pos]);
    auto n = parse_double(row[*neg]);
    auto u = parse_double(row[*neu]);
    if (!p || !n || !u) throw ParseError(source, reader.line(), "non-numeric probability");
    auto key = CsvHeader::trim(row[*id]);
    if (key.empty()) throw ParseError(source, reader.line(), "empty doc_id");
    try {
      if (!out.emplace(key, SentimentProbs::from(*p, *n, *u)).second)
        throw ParseError(source, reader.line(), "duplicate doc_id '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, reader.line(), e.what());
    }
  }
  return out;
}

inline std::map<std::string, SentimentProbs> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_scores(in, path.string());
}

}  // namespace narr
