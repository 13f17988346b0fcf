#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <sstream>

#include "narr/gsdmm.hpp"
#include "oracles.hpp"

using namespace narr;

namespace {

std::vector<TokenDoc> docs_of(std::initializer_list<std::vector<TokenId>> toks) {
  std::vector<TokenDoc> out;
  for (const auto& t : toks) out.push_back({"d" + std::to_string(out.size()), Day{}, t});
  return out;
}

GsdmmState held_out_state(const oracle::RandomCase& c) {
  auto s = recount(c.docs, c.vocab_size, c.k_max, c.labels);
  s.unassign(c.held_out, word_counts(c.docs[c.held_out]));
  return s;
}

GsdmmConfig config(const oracle::RandomCase& c) {
  GsdmmConfig cfg;
  cfg.k_max = c.k_max;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  return cfg;
}

void check_consistent(const GsdmmState& s, std::span<const TokenDoc> docs) {
  auto fresh = recount(docs, s.vocab_size(), s.k_max(), s.labels());
  REQUIRE(fresh == s);
  std::size_t m = 0;
  for (std::size_t k = 0; k < s.k_max(); ++k) {
    m += s.doc_count(k);
    auto row = s.cluster_words(k);
    CHECK(std::accumulate(row.begin(), row.end(), std::uint64_t{0}) == s.word_total(k));
  }
  CHECK(m == s.n_docs());
}

}  // namespace

TEST_CASE("Rng is mt19937_64 with fixed mappings") {
  Rng r(42);
  std::mt19937_64 ref(42);
  for (int i = 0; i < 100; ++i) CHECK(r.next() == ref());
  Rng a(1), b(1);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(b.below(7) < 7);
  }
}

TEST_CASE("init seats every document") {
  auto docs = docs_of({{0, 1}, {1}, {2, 2, 0}, {1, 2}});
  GsdmmConfig one;
  one.k_max = 1;
  auto s = init(docs, 3, one);
  CHECK(s.doc_count(0) == 4);
  for (auto z : s.labels()) CHECK(z == 0);

  GsdmmConfig cfg;
  CHECK(init(docs, 3, cfg) == init(docs, 3, cfg));
  check_consistent(init(docs, 3, cfg), docs);

  CHECK_THROWS_AS(init(std::vector<TokenDoc>{}, 3, cfg), Error);
  CHECK_THROWS_AS(init(docs, 2, cfg), Error);
  cfg.alpha = 0;
  CHECK_THROWS_AS(init(docs, 3, cfg), Error);
}

TEST_CASE("conditional examples") {
  auto docs = docs_of({{0, 1}, {1}, {0, 1}, {0, 1}});
  GsdmmConfig cfg;
  cfg.k_max = 1;
  auto s = recount(docs, 2, 1, std::vector<std::uint32_t>(4, 0));
  s.unassign(0, word_counts(docs[0]));
  CHECK(conditional(docs[0], s, cfg) == std::vector<double>{1.0});

  // Clusters 0 and 1 hold identical content, so they must tie.
  cfg.k_max = 3;
  s = recount(docs, 2, 3, std::vector<std::uint32_t>{2, 2, 0, 1});
  s.unassign(0, word_counts(docs[0]));
  auto p = conditional(docs[0], s, cfg);
  CHECK(p[0] == p[1]);
  CHECK(p[2] < p[0]);
}

TEST_CASE("conditional is a distribution matching the direct product") {
  std::mt19937_64 g(1234);
  for (int i = 0; i < 500; ++i) {
    auto c = oracle::random_case(g);
    auto s = held_out_state(c);
    auto p = conditional(c.docs[c.held_out], s, config(c));
    auto ref = oracle::conditional(c.raw, c.labels, c.held_out, c.vocab_size, c.k_max, c.alpha, c.beta);
    REQUIRE(p.size() == c.k_max);
    double sum = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(p[k] >= 0.0);
      CHECK(std::abs(p[k] - ref[k]) <= 1e-9);
      sum += p[k];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("with a one-word vocabulary only cluster sizes matter") {
  auto docs = docs_of({{0}, {0}, {0}, {0}, {0}, {0}});
  GsdmmConfig cfg;
  cfg.k_max = 4;
  auto s = recount(docs, 1, 4, std::vector<std::uint32_t>{0, 0, 0, 1, 2, 1});
  s.unassign(0, word_counts(docs[0]));
  auto p = conditional(docs[0], s, cfg);
  const double z = 2.1 + 2.1 + 1.1 + 0.1;
  CHECK(p[0] == Catch::Approx(2.1 / z).epsilon(1e-12));
  CHECK(p[1] == Catch::Approx(2.1 / z).epsilon(1e-12));
  CHECK(p[2] == Catch::Approx(1.1 / z).epsilon(1e-12));
  CHECK(p[3] == Catch::Approx(0.1 / z).epsilon(1e-12));
}

TEST_CASE("counts are conserved through every sweep") {
  auto syn = oracle::disjoint_corpus(300, 6, 5);
  GsdmmConfig cfg;
  cfg.k_max = 12;
  cfg.n_iters = 10;
  std::size_t seen = 0;
  fit(syn.docs, syn.vocab_size, cfg, [&](std::size_t, const GsdmmState& s) {
    check_consistent(s, syn.docs);
    ++seen;
  });
  CHECK(seen == 10);

  Rng rng(3);
  auto s = init(syn.docs, syn.vocab_size, cfg, rng);
  gibbs_iteration(s, syn.docs, cfg, rng);
  check_consistent(s, syn.docs);
}

TEST_CASE("fit is deterministic and respects n_iters") {
  auto syn = oracle::disjoint_corpus(200, 8, 9);
  GsdmmConfig cfg;
  cfg.n_iters = 5;
  cfg.seed = 77;
  auto a = fit(syn.docs, syn.vocab_size, cfg);
  auto b = fit(syn.docs, syn.vocab_size, cfg);
  CHECK(a.state == b.state);
  CHECK(a.trajectory == b.trajectory);
  CHECK(a.trajectory.size() == 5);

  cfg.n_iters = 0;
  auto z = fit(syn.docs, syn.vocab_size, cfg);
  CHECK(z.trajectory.empty());
  CHECK(z.state == init(syn.docs, syn.vocab_size, cfg));

  cfg.k_max = 1;
  cfg.n_iters = 4;
  CHECK(fit(syn.docs, syn.vocab_size, cfg).trajectory == std::vector<std::size_t>(4, 1));
}

TEST_CASE("fit recovers disjoint vocabularies") {
  auto syn = oracle::disjoint_corpus(2000, 8, 101);
  GsdmmConfig cfg;
  cfg.seed = 1;
  auto r = fit(syn.docs, syn.vocab_size, cfg);
  const auto k = r.state.non_empty_clusters();
  CHECK(k >= 3);
  CHECK(k <= 6);
  CHECK(purity(r.state.labels(), std::span<const int>(syn.topic)) >= 0.9);

  // Top words of each sizeable cluster come from a single vocabulary.
  for (const auto& c : summarize(r.state, cfg, 10)) {
    if (c.doc_count < 100) continue;
    auto topic = c.top_words.front().word / 50;
    for (const auto& w : c.top_words) CHECK(w.word / 50 == topic);
  }
}

TEST_CASE("identical one-word documents collapse to one cluster") {
  std::vector<TokenDoc> docs(20, TokenDoc{"", Day{}, {0}});
  for (std::size_t d = 0; d < docs.size(); ++d) docs[d].doc_id = std::to_string(d);
  GsdmmConfig cfg;
  cfg.k_max = 10;
  cfg.n_iters = 10;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    cfg.seed = seed;
    auto r = fit(docs, 50, cfg);
    CHECK(r.trajectory.back() == 1);
  }
}

TEST_CASE("relabeling documents permutes the labels") {
  auto syn = oracle::disjoint_corpus(60, 5, 4);
  GsdmmConfig cfg;
  cfg.k_max = 8;
  cfg.n_iters = 6;
  auto a = fit(syn.docs, syn.vocab_size, cfg);
  auto renamed = syn.docs;
  for (std::size_t d = 0; d < renamed.size(); ++d) renamed[d].doc_id = "x" + std::to_string(renamed.size() - d);
  auto b = fit(renamed, syn.vocab_size, cfg);
  CHECK(std::ranges::equal(a.state.labels(), b.state.labels()));
}

TEST_CASE("phi_hat and theta_hat") {
  // Cluster 0 holds word 0 ten times; vocabulary of 5.
  std::vector<TokenDoc> docs{{"a", Day{}, std::vector<TokenId>(10, 0)}};
  GsdmmConfig cfg;
  cfg.k_max = 2;
  auto s = recount(docs, 5, 2, std::vector<std::uint32_t>{0});
  CHECK(phi_hat(s, cfg, 0, 0) == Catch::Approx(10.1 / 10.5).epsilon(1e-12));
  CHECK(phi_hat(s, cfg, 0, 0) == Catch::Approx(0.9619).margin(1e-4));
  for (TokenId w = 0; w < 5; ++w) CHECK(phi_hat(s, cfg, 1, w) == Catch::Approx(0.2).epsilon(1e-12));

  std::vector<TokenDoc> ten(10, TokenDoc{"", Day{}, {0}});
  cfg.k_max = 5;
  auto t = recount(ten, 1, 5, std::vector<std::uint32_t>{0, 0, 1, 1, 1, 2, 2, 2, 2, 3});
  CHECK(theta_hat(t, cfg, 0) == Catch::Approx(0.2).epsilon(1e-12));

  std::mt19937_64 g(6);
  for (int i = 0; i < 100; ++i) {
    auto c = oracle::random_case(g);
    auto st = recount(c.docs, c.vocab_size, c.k_max, c.labels);
    auto cc = config(c);
    double th = 0;
    for (std::size_t k = 0; k < c.k_max; ++k) {
      th += theta_hat(st, cc, k);
      double ph = 0;
      for (TokenId w = 0; w < c.vocab_size; ++w) ph += phi_hat(st, cc, k, w);
      CHECK(std::abs(ph - 1.0) <= 1e-9);
    }
    CHECK(std::abs(th - 1.0) <= 1e-12);
  }
}

TEST_CASE("summarize orders clusters and words") {
  auto docs = docs_of({{0, 0, 1}, {2}, {0, 3}, {4}});
  GsdmmConfig cfg;
  cfg.k_max = 3;
  auto s = recount(docs, 5, 3, std::vector<std::uint32_t>{2, 0, 2, 0});
  auto sum = summarize(s, cfg, 10);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].cluster == 0);  // tie on size, lower id first
  CHECK(sum[1].cluster == 2);
  REQUIRE(sum[1].top_words.size() == 5);  // top_n larger than V
  CHECK(sum[1].top_words[0].word == 0);
  CHECK(sum[1].top_words[1].word == 1);
  CHECK(sum[1].top_words[2].word == 3);
  for (const auto& c : sum)
    for (std::size_t i = 0; i < c.top_words.size(); ++i) {
      CHECK(c.top_words[i].weight > 0.0);
      CHECK(c.top_words[i].weight <= 1.0);
      if (i) CHECK(c.top_words[i].weight <= c.top_words[i - 1].weight);
    }

  GsdmmConfig one;
  one.k_max = 1;
  auto single = summarize(recount(docs, 5, 1, std::vector<std::uint32_t>(4, 0)), one, 2);
  REQUIRE(single.size() == 1);
  CHECK(single[0].doc_count == 4);
}

TEST_CASE("purity counts majority matches") {
  std::vector<int> z{0, 0, 0, 1, 1, 2};
  std::vector<char> t{'a', 'a', 'b', 'b', 'b', 'a'};
  CHECK(purity(std::span<const int>(z), std::span<const char>(t)) == Catch::Approx(5.0 / 6.0));
}

TEST_CASE("labels CSV round-trips and the model JSON has every document") {
  Vocabulary v;
  v.add("moon");
  v.add("gox");
  std::vector<TokenDoc> docs{{"a", Day{}, {0}}, {"b,c", Day{}, {1, 1}}};
  GsdmmConfig cfg;
  cfg.k_max = 3;
  cfg.n_iters = 2;
  auto r = fit(docs, 2, cfg);
  std::stringstream buf;
  write_labels_csv(buf, docs, r.state);
  auto back = read_labels_csv(buf, "labels.csv");
  CHECK(back.at("a") == r.state.label(0));
  CHECK(back.at("b,c") == r.state.label(1));

  auto j = model_json(r, docs, v, cfg, 5);
  CHECK(j["labels"].size() == 2);
  CHECK(j["trajectory"].size() == 2);
  CHECK(j["config"]["k_max"] == 3);
}
