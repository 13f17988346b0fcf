#include <catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "narr/corpus.hpp"

using namespace narr;

namespace {

PostLoad csv(const std::string& body, const LoadOptions& opts = {}) {
  std::istringstream in(body);
  return read_posts_csv(in, "test.csv", opts);
}

RawPost post(std::string id, std::string text) {
  return {std::move(id), *parse_timestamp("2014-03-04T10:00:00Z"), std::move(text)};
}

}  // namespace

TEST_CASE("load_posts drops rows with empty text and counts them") {
  auto r = csv("id,created_at,text\n1,2014-03-04T10:00:00Z,hello\n2,2014-03-04T11:00:00Z,\n3,2014-03-05,world\n");
  REQUIRE(r.posts.size() == 2);
  CHECK(r.dropped.total() == 1);
  CHECK(r.dropped.empty_text == 1);
  CHECK(r.posts[0].id == "1");
  CHECK(r.posts[1].text == "world");
  CHECK(format_date(r.posts[1].day()) == "2014-03-05");
}

TEST_CASE("load_posts keeps duplicate texts") {
  auto r = csv("id,created_at,text\n1,2014-03-04,same\n2,2014-03-04,same\n");
  CHECK(r.posts.size() == 2);
  CHECK(r.dropped.total() == 0);
}

TEST_CASE("load_posts rejects a file with no surviving rows") {
  CHECK_THROWS_WITH(csv(""), Catch::Matchers::ContainsSubstring("zero surviving rows"));
  CHECK_THROWS_WITH(csv("id,created_at,text\n"), Catch::Matchers::ContainsSubstring("zero surviving rows"));
  CHECK_THROWS_WITH(csv("id,created_at,text\n1,2014-03-04,NA\n"),
                    Catch::Matchers::ContainsSubstring("zero surviving rows"));
}

TEST_CASE("load_posts counts every drop reason") {
  auto r = csv(
      "tweet_id,timestamp,content\n"
      ",2014-03-04,no id\n"
      "a,yesterday,bad time\n"
      "b,2014-03-04T25:00:00Z,bad hour\n"
      "c,2014-03-04,NA\n"
      "d,2014-03-04,ok\n"
      "d,2014-03-04,again\n"
      "e,2013-12-31T23:59:59Z,early\n",
      {parse_date("2014-01-01"), std::nullopt});
  CHECK(r.posts.size() == 1);
  CHECK(r.dropped.missing_id == 1);
  CHECK(r.dropped.bad_timestamp == 2);
  CHECK(r.dropped.empty_text == 1);
  CHECK(r.dropped.duplicate_id == 1);
  CHECK(r.dropped.out_of_window == 1);
}

TEST_CASE("load_posts handles quoted fields with commas and newlines") {
  auto r = csv("id,created_at,text\n1,2014-03-04,\"a, \"\"quoted\"\"\nline\"\n");
  REQUIRE(r.posts.size() == 1);
  CHECK(r.posts[0].text == "a, \"quoted\"\nline");
}

TEST_CASE("load_posts reads JSON lines") {
  std::istringstream in(
      "{\"id\": 7, \"created_at\": \"2014-03-04T23:30:00-02:00\", \"text\": \"late\"}\n"
      "\n"
      "{\"id\": \"8\", \"created_at\": \"2014-03-04\", \"text\": \"\"}\n");
  auto r = read_posts_jsonl(in, "x.jsonl");
  REQUIRE(r.posts.size() == 1);
  CHECK(r.posts[0].id == "7");
  CHECK(format_date(r.posts[0].day()) == "2014-03-05");
  CHECK(r.dropped.empty_text == 1);

  std::istringstream bad("{\"id\": 1, \"created_at\": \"2014-03-04\", \"text\": \"x\"}\n{oops\n");
  try {
    read_posts_jsonl(bad, "x.jsonl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("load_posts reports an unreadable file") {
  CHECK_THROWS_AS(load_posts("/nonexistent/posts.csv", PostFormat::csv), Error);
  CHECK_FALSE(parse_post_format("xml"));
  CHECK(post_format_for("a/b.jsonl") == PostFormat::jsonl);
  CHECK(post_format_for("a/b.csv") == PostFormat::csv);
}

TEST_CASE("timestamps parse as UTC instants") {
  CHECK(format_timestamp(*parse_timestamp("2014-03-04T10:11:12Z")) == "2014-03-04T10:11:12Z");
  CHECK(format_timestamp(*parse_timestamp("2014-03-04 10:11:12.5+01:30")) == "2014-03-04T08:41:12Z");
  CHECK(format_timestamp(*parse_timestamp("2014-03-04T10:11")) == "2014-03-04T10:11:00Z");
  CHECK_FALSE(parse_timestamp("2014-02-30"));
  CHECK_FALSE(parse_timestamp("2014-03-04T10"));
  CHECK_FALSE(parse_timestamp("2014-03-04T10:11:12Q"));
}

TEST_CASE("dedup keeps the first occurrence of each text") {
  std::vector<RawPost> in{post("1", "A"), post("2", "A"), post("3", "B")};
  auto out = dedup(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == "1");
  CHECK(out[1].id == "3");

  std::vector<RawPost> distinct{post("1", "x"), post("2", "y"), post("3", "z")};
  CHECK(dedup(distinct) == distinct);

  std::vector<RawPost> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(post(std::to_string(i), i < 4 ? "shared" : "t" + std::to_string(i)));
  CHECK(dedup(ten).size() == 7);
}

TEST_CASE("dedup is idempotent and matches a distinct-text count") {
  std::mt19937_64 g(11);
  for (int round = 0; round < 25; ++round) {
    std::size_t n = g() % 1000;
    std::size_t alphabet = 1 + g() % 300;
    std::vector<RawPost> posts;
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < n; ++i) {
      auto text = "text " + std::to_string(g() % alphabet);
      distinct.insert(text);
      posts.push_back(post(std::to_string(i), text));
    }
    auto once = dedup(posts);
    CHECK(once.size() == distinct.size());
    CHECK(dedup(once) == once);
  }
}

TEST_CASE("load_prices validates the series") {
  std::istringstream good("date,close\n2014-01-01,1\n2014-01-02,2\n2014-01-03,3\n2014-01-05,4\n2014-01-06,5.5\n");
  auto p = read_prices(good, "p.csv");
  CHECK(p.size() == 5);
  CHECK(p.close_on(*parse_date("2014-01-06")) == 5.5);
  CHECK_FALSE(p.close_on(*parse_date("2014-01-04")));
  CHECK(p.log_closes()[1] == Catch::Approx(std::log(2.0)));

  std::istringstream zero("date,close\n2014-01-01,1\n2014-01-02,0\n");
  CHECK_THROWS_AS(read_prices(zero, "p.csv"), ParseError);
  std::istringstream order("date,close\n2014-01-02,1\n2014-01-01,2\n");
  CHECK_THROWS_AS(read_prices(order, "p.csv"), ParseError);
  std::istringstream header("day,price\n2014-01-01,1\n");
  CHECK_THROWS_AS(read_prices(header, "p.csv"), ParseError);
  CHECK_THROWS_AS(load_prices("/nonexistent/prices.csv"), Error);
}

TEST_CASE("vocabulary ids are dense and round-trip") {
  Vocabulary v;
  std::vector<std::string> words{"moon", "bitcoin", "moon", "hodl", "bitcoin", "gox"};
  for (const auto& w : words) v.add(w);
  REQUIRE(v.size() == 4);
  for (TokenId i = 0; i < v.size(); ++i) CHECK(v.find(v.token(i)) == i);
  for (const auto& w : words) CHECK(v.token(*v.find(w)) == w);
  CHECK_FALSE(v.find("absent"));
}

TEST_CASE("csv writer escapes and doubles round-trip") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::mt19937_64 g(3);
  for (int i = 0; i < 1000; ++i) {
    double v = std::ldexp(static_cast<double>(g() >> 11), -40) - 1000.0;
    CHECK(parse_double(format_double(v)) == v);
  }
}
