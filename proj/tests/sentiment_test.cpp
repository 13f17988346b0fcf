#include <catch_amalgamated.hpp>

#include <sstream>

#include "narr/sentiment.hpp"

using namespace narr;
using V = CompositeVariant;

TEST_CASE("probabilities are validated and renormalized") {
  auto p = SentimentProbs::from(0.944, 0.01, 0.05);
  CHECK(p.pos() + p.neg() + p.neu() == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(p.pos() == Catch::Approx(0.944 / 1.004));
  CHECK_THROWS_AS(SentimentProbs::from(0.5, 0.5, 0.5), Error);
  CHECK_THROWS_AS(SentimentProbs::from(1.1, -0.1, 0.0), Error);
  CHECK_THROWS_AS(SentimentProbs::from(NAN, 0.5, 0.5), Error);
  CHECK_NOTHROW(SentimentProbs::from(0.5, 0.2, 0.3009));
  CHECK_THROWS_AS(SentimentProbs::from(0.5, 0.2, 0.306), Error);
}

TEST_CASE("composite of the example post clamps to one") {
  auto p = SentimentProbs::from(0.944, 0.01, 0.05);
  const double raw = composite_raw(p.pos(), p.neg(), p.neu(), V::cs2);
  CHECK(raw == Catch::Approx((0.934 / 1.004) * (1 + std::sqrt(0.05 / 1.004))).epsilon(1e-12));
  CHECK(raw == Catch::Approx(1.1379).margin(1e-3));
  CHECK(composite(p).value == 1.0);
  CHECK(composite(p).variant == V::cs2);
  CHECK(label(p) == SentimentLabel::pos);
  CHECK(to_string(label(p)) == "POS");
}

TEST_CASE("equal positive and negative mass scores zero") {
  for (double u : {0.0, 0.2, 0.5, 1.0}) {
    double h = (1 - u) / 2;
    auto p = SentimentProbs::from(h, h, u);
    CHECK(composite(p, V::cs1).value == 0.0);
    CHECK(composite(p, V::cs2).value == 0.0);
  }
}

TEST_CASE("cs2 peaks at 32/27") {
  double best = -1, at_pos = 0, at_neu = 0, cs1_max = -1;
  for (int i = 0; i <= 1000; ++i)
    for (int j = 0; i + j <= 1000; ++j) {
      double pos = i / 1000.0, neu = j / 1000.0, neg = 1 - pos - neu;
      double r = composite_raw(pos, neg, neu, V::cs2);
      if (r > best) {
        best = r;
        at_pos = pos;
        at_neu = neu;
      }
      cs1_max = std::max(cs1_max, composite_raw(pos, neg, neu, V::cs1));
    }
  CHECK(cs1_max == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(best - 32.0 / 27.0) <= 1e-3);
  CHECK(std::abs(at_pos - 8.0 / 9.0) <= 2e-3);
  CHECK(std::abs(at_neu - 1.0 / 9.0) <= 2e-3);
  // Stationary point of (1-u)(1+sqrt(u)) at u = 1/9.
  CHECK(composite_raw(8.0 / 9.0, 0.0, 1.0 / 9.0, V::cs2) == Catch::Approx(32.0 / 27.0).epsilon(1e-14));
}

TEST_CASE("composite is antisymmetric and bounded") {
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; i + j <= 100; ++j) {
      double a = i / 100.0, u = j / 100.0, b = std::max(0.0, 1 - a - u);
      for (auto v : {V::cs1, V::cs2}) {
        auto x = composite(SentimentProbs::from(a, b, u), v).value;
        auto y = composite(SentimentProbs::from(b, a, u), v).value;
        CHECK(x == -y);
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
      }
    }
}

TEST_CASE("cs2 raw score grows with neutral mass when pos - neg is fixed") {
  const double gap = 0.2;
  double prev = -1;
  for (int j = 0; j <= 80; ++j) {
    double neu = j / 100.0;
    double neg = std::max(0.0, (1 - neu - gap) / 2), pos = neg + gap;
    auto p = SentimentProbs::from(pos, neg, neu);
    double r = composite_raw(p.pos(), p.neg(), p.neu(), V::cs2);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("label takes the argmax with NEU > POS > NEG on ties") {
  CHECK(label(SentimentProbs::from(1.0 / 3, 1.0 / 3, 1.0 / 3)) == SentimentLabel::neu);
  CHECK(label(SentimentProbs::from(0.1, 0.7, 0.2)) == SentimentLabel::neg);
  CHECK(label(SentimentProbs::from(0.4, 0.4, 0.2)) == SentimentLabel::pos);
  CHECK(label(SentimentProbs::from(0.2, 0.4, 0.4)) == SentimentLabel::neu);
  for (double s : {0.9995, 1.0, 1.0008}) CHECK(label(SentimentProbs::from(0.1 * s, 0.6 * s, 0.3 * s)) == SentimentLabel::neg);
}

TEST_CASE("lexicon scorer") {
  auto none = lexicon_score(std::vector<std::string>{"price", "today"});
  CHECK(none.pos() == 0.0);
  CHECK(none.neg() == 0.0);
  CHECK(none.neu() == 1.0);

  auto good = lexicon_score(std::vector<std::string>{"good"});
  CHECK(good.pos() == 0.5);
  CHECK(good.neg() == 0.0);
  CHECK(good.neu() == 0.5);

  auto both = lexicon_score(std::vector<std::string>{"good", "crash", "price"});
  CHECK(both.pos() == both.neg());
  CHECK(composite(both).value == 0.0);
}

TEST_CASE("variant names parse") {
  CHECK(parse_variant("cs1") == V::cs1);
  CHECK(parse_variant("cs2") == V::cs2);
  CHECK_FALSE(parse_variant("cs3"));
}

TEST_CASE("load_scores validates rows and names the line") {
  std::istringstream ok("doc_id,pos,neg,neu,model\n1,0.944,0.01,0.05,x\n2,0,0,1,y\n");
  auto m = read_scores(ok, "s.csv");
  REQUIRE(m.size() == 2);
  CHECK(m.at("1").pos() + m.at("1").neg() + m.at("1").neu() == Catch::Approx(1.0).epsilon(1e-15));

  auto fails_on = [](const std::string& body) {
    std::istringstream in(body);
    try {
      read_scores(in, "s.csv");
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(fails_on("doc_id,pos,neg,neu\n1,0.2,0.3,0.5\n2,0.5,0.5,0.5\n") == 3);
  CHECK(fails_on("doc_id,pos,neg,neu\n1,0.2,0.3,0.5\n1,0.2,0.3,0.5\n") == 3);
  CHECK(fails_on("doc_id,pos,neg,neu\n1,-0.2,0.7,0.5\n") == 2);
  CHECK(fails_on("doc_id,pos,neg,neu\n1,x,0.3,0.5\n") == 2);
  CHECK(fails_on("id,p,n,u\n") == 1);
  CHECK_THROWS_AS(load_scores("/nonexistent/scores.csv"), Error);
}
