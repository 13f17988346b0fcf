#pragma once

// Collapsed Gibbs sampler for the Dirichlet Multinomial Mixture (GSDMM).
//
// Each document carries exactly one cluster label. With the document's own
// counts removed, the label is resampled from
//
//   p(z_d = k) ∝ (m_k + α) / (D - 1 + K·α)
//              · Π_{w∈d} Π_{j=1..N_d^w} (n_k^w + β + j - 1)
//              / Π_{i=1..N_d} (n_k + V·β + i - 1)
//
// where m_k counts documents, n_k tokens and n_k^w occurrences of w in
// cluster k. The first factor favours large clusters, the second clusters
// whose words overlap the document. Everything is evaluated in log space.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "narr/corpus.hpp"
#include "narr/csv.hpp"
#include "narr/error.hpp"
#include "narr/preprocess.hpp"

namespace narr {

struct GsdmmConfig {
  std::size_t k_max = 40;
  double alpha = 0.1;
  double beta = 0.1;
  std::size_t n_iters = 30;
  std::uint64_t seed = 42;

  void validate() const {
    if (k_max == 0) throw Error("gsdmm: k_max must be positive");
    if (!(alpha > 0) || !std::isfinite(alpha)) throw Error("gsdmm: alpha must be positive");
    if (!(beta > 0) || !std::isfinite(beta)) throw Error("gsdmm: beta must be positive");
  }
};

// The sampler's only source of randomness: std::mt19937_64, whose output
// sequence is fixed by the C++ standard, mapped to [0,1) by taking the top
// 53 bits and to [0,n) by a 128-bit multiply-shift. No std:: distributions
// are involved, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

// Sufficient statistics of the sampler plus the label vector.
class GsdmmState {
 public:
  static constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

  GsdmmState() = default;
  GsdmmState(std::size_t n_docs, std::size_t vocab_size, std::size_t k_max)
      : n_docs_(n_docs),
        vocab_size_(vocab_size),
        k_max_(k_max),
        labels_(n_docs, kUnassigned),
        doc_count_(k_max, 0),
        word_total_(k_max, 0),
        word_count_(k_max * vocab_size, 0) {}

  std::size_t n_docs() const { return n_docs_; }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t k_max() const { return k_max_; }

  std::uint32_t label(std::size_t d) const { return labels_[d]; }
  std::span<const std::uint32_t> labels() const { return labels_; }
  std::uint32_t doc_count(std::size_t k) const { return doc_count_[k]; }
  std::uint32_t word_total(std::size_t k) const { return word_total_[k]; }
  std::uint32_t word_count(std::size_t k, TokenId w) const { return word_count_[k * vocab_size_ + w]; }
  std::span<const std::uint32_t> cluster_words(std::size_t k) const {
    return {word_count_.data() + k * vocab_size_, vocab_size_};
  }

  std::size_t non_empty_clusters() const {
    return static_cast<std::size_t>(std::ranges::count_if(doc_count_, [](std::uint32_t m) { return m > 0; }));
  }

  void assign(std::size_t d, std::uint32_t k, std::span<const WordCount> words) {
    labels_[d] = k;
    ++doc_count_[k];
    auto* row = word_count_.data() + k * vocab_size_;
    for (const auto& wc : words) {
      row[wc.word] += wc.count;
      word_total_[k] += wc.count;
    }
  }

  void unassign(std::size_t d, std::span<const WordCount> words) {
    auto k = labels_[d];
    labels_[d] = kUnassigned;
    --doc_count_[k];
    auto* row = word_count_.data() + k * vocab_size_;
    for (const auto& wc : words) {
      row[wc.word] -= wc.count;
      word_total_[k] -= wc.count;
    }
  }

  friend bool operator==(const GsdmmState&, const GsdmmState&) = default;

 private:
  std::size_t n_docs_ = 0;
  std::size_t vocab_size_ = 0;
  std::size_t k_max_ = 0;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint32_t> doc_count_;
  std::vector<std::uint32_t> word_total_;
  std::vector<std::uint32_t> word_count_;  // k_max x vocab_size, row-major
};

// Builds a state from a label vector, counting everything from scratch.
inline GsdmmState recount(std::span<const TokenDoc> docs, std::size_t vocab_size, std::size_t k_max,
                          std::span<const std::uint32_t> labels) {
  if (labels.size() != docs.size()) throw Error("recount: label vector does not match corpus");
  GsdmmState s(docs.size(), vocab_size, k_max);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (labels[d] >= k_max) throw Error("recount: label out of range");
    for (TokenId t : docs[d].tokens)
      if (t >= vocab_size) throw Error("recount: token id outside vocabulary");
    s.assign(d, labels[d], word_counts(docs[d]));
  }
  return s;
}

namespace detail {

inline void check_corpus(std::span<const TokenDoc> docs, std::size_t vocab_size) {
  if (docs.empty()) throw Error("gsdmm: empty corpus");
  if (vocab_size == 0) throw Error("gsdmm: empty vocabulary");
  for (const auto& d : docs) {
    if (d.tokens.empty()) throw Error("gsdmm: document " + d.doc_id + " has no tokens");
    for (TokenId t : d.tokens)
      if (t >= vocab_size) throw Error("gsdmm: token id outside vocabulary in " + d.doc_id);
  }
}

// Unnormalized log weight of cluster k for a document with the given word counts.
inline double log_weight(const GsdmmState& s, const GsdmmConfig& cfg, std::size_t k,
                         std::span<const WordCount> words, std::uint32_t n_tokens, double log_doc_norm) {
  const double vbeta = static_cast<double>(s.vocab_size()) * cfg.beta;
  double lp = std::log(s.doc_count(k) + cfg.alpha) - log_doc_norm;
  for (const auto& wc : words) {
    const double base = s.word_count(k, wc.word) + cfg.beta;
    for (std::uint32_t j = 0; j < wc.count; ++j) lp += std::log(base + j);
  }
  const double denom = s.word_total(k) + vbeta;
  for (std::uint32_t i = 0; i < n_tokens; ++i) lp -= std::log(denom + i);
  return lp;
}

// Fills `out` (size k_max) with the normalized conditional. The document must
// not be counted in `s`.
inline void conditional_into(const GsdmmState& s, const GsdmmConfig& cfg, std::span<const WordCount> words,
                             std::uint32_t n_tokens, std::vector<double>& out) {
  const std::size_t K = s.k_max();
  out.resize(K);
  const double log_doc_norm =
      std::log(static_cast<double>(s.n_docs()) - 1.0 + static_cast<double>(K) * cfg.alpha);
  // Every empty cluster scores the same; evaluate it once.
  double empty_lp = 0.0;
  bool have_empty = false;
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    double lp;
    if (s.doc_count(k) == 0) {
      if (!have_empty) {
        empty_lp = log_weight(s, cfg, k, words, n_tokens, log_doc_norm);
        have_empty = true;
      }
      lp = empty_lp;
    } else {
      lp = log_weight(s, cfg, k, words, n_tokens, log_doc_norm);
    }
    out[k] = lp;
    max_lp = std::max(max_lp, lp);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - max_lp);
    total += v;
  }
  for (double& v : out) v /= total;
}

inline std::uint32_t draw(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    cum += probs[k];
    if (u < cum) return static_cast<std::uint32_t>(k);
  }
  // Rounding left u above the final partial sum.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0) return static_cast<std::uint32_t>(k);
  return 0;
}

inline void sweep(GsdmmState& s, std::span<const TokenDoc> docs, std::span<const std::vector<WordCount>> counts,
                  const GsdmmConfig& cfg, Rng& rng, std::vector<double>& scratch) {
  for (std::size_t d = 0; d < docs.size(); ++d) {
    s.unassign(d, counts[d]);
    conditional_into(s, cfg, counts[d], static_cast<std::uint32_t>(docs[d].tokens.size()), scratch);
    s.assign(d, draw(scratch, rng), counts[d]);
  }
}

inline std::vector<std::vector<WordCount>> all_word_counts(std::span<const TokenDoc> docs) {
  std::vector<std::vector<WordCount>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(word_counts(d));
  return out;
}

}  // namespace detail

// Uniform random initial seating.
inline GsdmmState init(std::span<const TokenDoc> docs, std::size_t vocab_size, const GsdmmConfig& cfg, Rng& rng) {
  cfg.validate();
  detail::check_corpus(docs, vocab_size);
  GsdmmState s(docs.size(), vocab_size, cfg.k_max);
  for (std::size_t d = 0; d < docs.size(); ++d)
    s.assign(d, static_cast<std::uint32_t>(rng.below(cfg.k_max)), word_counts(docs[d]));
  return s;
}

inline GsdmmState init(std::span<const TokenDoc> docs, std::size_t vocab_size, const GsdmmConfig& cfg) {
  Rng rng(cfg.seed);
  return init(docs, vocab_size, cfg, rng);
}

// Conditional over clusters for `doc`, which must already be removed from `s`.
inline std::vector<double> conditional(const TokenDoc& doc, const GsdmmState& s, const GsdmmConfig& cfg) {
  std::vector<double> out;
  detail::conditional_into(s, cfg, word_counts(doc), static_cast<std::uint32_t>(doc.tokens.size()), out);
  return out;
}

// One sweep over the corpus in document order.
inline void gibbs_iteration(GsdmmState& s, std::span<const TokenDoc> docs, const GsdmmConfig& cfg, Rng& rng) {
  if (docs.size() != s.n_docs()) throw Error("gibbs_iteration: corpus does not match state");
  auto counts = detail::all_word_counts(docs);
  std::vector<double> scratch;
  detail::sweep(s, docs, counts, cfg, rng, scratch);
}

struct FitResult {
  GsdmmState state;
  std::vector<std::size_t> trajectory;  // non-empty clusters after each iteration
};

using IterationObserver = std::function<void(std::size_t iteration, const GsdmmState&)>;

inline FitResult fit(std::span<const TokenDoc> docs, std::size_t vocab_size, const GsdmmConfig& cfg,
                     const IterationObserver& observe = {}) {
  Rng rng(cfg.seed);
  FitResult r{init(docs, vocab_size, cfg, rng), {}};
  auto counts = detail::all_word_counts(docs);
  std::vector<double> scratch;
  r.trajectory.reserve(cfg.n_iters);
  for (std::size_t it = 0; it < cfg.n_iters; ++it) {
    detail::sweep(r.state, docs, counts, cfg, rng, scratch);
    r.trajectory.push_back(r.state.non_empty_clusters());
    if (observe) observe(it, r.state);
  }
  return r;
}

// Posterior-mean word distribution of cluster k.
inline double phi_hat(const GsdmmState& s, const GsdmmConfig& cfg, std::size_t k, TokenId w) {
  return (s.word_count(k, w) + cfg.beta) / (s.word_total(k) + static_cast<double>(s.vocab_size()) * cfg.beta);
}

// Posterior-mean cluster weight.
inline double theta_hat(const GsdmmState& s, const GsdmmConfig& cfg, std::size_t k) {
  return (s.doc_count(k) + cfg.alpha) / (static_cast<double>(s.n_docs()) + static_cast<double>(s.k_max()) * cfg.alpha);
}

struct TopWord {
  TokenId word;
  double weight;
};

struct ClusterSummary {
  std::uint32_t cluster;
  std::uint32_t doc_count;
  std::vector<TopWord> top_words;
};

// Non-empty clusters by descending size (ties: lower id first), each with its
// top_n words by descending phi_hat (ties: lower token id first).
inline std::vector<ClusterSummary> summarize(const GsdmmState& s, const GsdmmConfig& cfg, std::size_t top_n) {
  std::vector<ClusterSummary> out;
  for (std::uint32_t k = 0; k < s.k_max(); ++k)
    if (s.doc_count(k) > 0) out.push_back({k, s.doc_count(k), {}});
  std::ranges::stable_sort(out, std::greater<>{}, &ClusterSummary::doc_count);

  std::vector<TokenId> ids(s.vocab_size());
  const std::size_t n = std::min(top_n, s.vocab_size());
  for (auto& c : out) {
    auto row = s.cluster_words(c.cluster);
    for (TokenId w = 0; w < ids.size(); ++w) ids[w] = w;
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](TokenId a, TokenId b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
    c.top_words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) c.top_words.push_back({ids[i], phi_hat(s, cfg, c.cluster, ids[i])});
  }
  return out;
}

// Fraction of documents whose cluster's majority reference class is their own.
template <class Assigned, class Truth>
double purity(std::span<const Assigned> assigned, std::span<const Truth> truth) {
  if (assigned.size() != truth.size() || assigned.empty()) throw Error("purity: size mismatch");
  std::map<Assigned, std::map<Truth, std::size_t>> table;
  for (std::size_t i = 0; i < assigned.size(); ++i) ++table[assigned[i]][truth[i]];
  std::size_t hits = 0;
  for (const auto& [c, row] : table) {
    std::size_t best = 0;
    for (const auto& [t, n] : row) best = std::max(best, n);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(assigned.size());
}

inline nlohmann::json model_json(const FitResult& fit, std::span<const TokenDoc> docs, const Vocabulary& vocab,
                                 const GsdmmConfig& cfg, std::size_t top_n) {
  const auto& s = fit.state;
  nlohmann::json j;
  j["config"] = {{"k_max", cfg.k_max}, {"alpha", cfg.alpha}, {"beta", cfg.beta},
                 {"n_iters", cfg.n_iters}, {"seed", cfg.seed}};
  j["n_docs"] = s.n_docs();
  j["vocab_size"] = s.vocab_size();
  j["trajectory"] = fit.trajectory;
  auto& clusters = j["clusters"] = nlohmann::json::array();
  for (const auto& c : summarize(s, cfg, top_n)) {
    nlohmann::json cj;
    cj["id"] = c.cluster;
    cj["doc_count"] = c.doc_count;
    cj["word_count"] = s.word_total(c.cluster);
    cj["theta"] = theta_hat(s, cfg, c.cluster);
    auto& words = cj["top_words"] = nlohmann::json::array();
    for (const auto& tw : c.top_words) words.push_back({{"token", vocab.token(tw.word)}, {"weight", tw.weight}});
    clusters.push_back(std::move(cj));
  }
  auto& labels = j["labels"] = nlohmann::json::object();
  for (std::size_t d = 0; d < docs.size(); ++d) labels[docs[d].doc_id] = s.label(d);
  return j;
}

inline void write_labels_csv(std::ostream& out, std::span<const TokenDoc> docs, const GsdmmState& s) {
  out << "doc_id,cluster\n";
  for (std::size_t d = 0; d < docs.size(); ++d) write_csv_row(out, {docs[d].doc_id, std::to_string(s.label(d))});
}

inline std::map<std::string, std::uint32_t> read_labels_csv(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(source + ": empty labels file");
  CsvHeader header(row);
  auto id_col = header.find("doc_id");
  auto k_col = header.find("cluster");
  if (!id_col || !k_col) throw ParseError(source, reader.line(), "expected header doc_id,cluster");
  std::map<std::string, std::uint32_t> out;
  while (reader.next(row)) {
    if (row.size() <= std::max(*id_col, *k_col)) throw ParseError(source, reader.line(), "short row");
    auto k = parse_int<std::uint32_t>(row[*k_col]);
    if (!k) throw ParseError(source, reader.line(), "bad cluster id");
    if (!out.emplace(CsvHeader::trim(row[*id_col]), *k).second)
      throw ParseError(source, reader.line(), "duplicate doc_id");
  }
  return out;
}

}  // namespace narr
