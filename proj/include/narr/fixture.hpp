#pragma once

// Synthetic, fully offline demo data: posts drawn from four topic
// vocabularies with injected sentiment words, and a daily price series with
// two level shifts in log price. Generation depends only on the seed.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "narr/corpus.hpp"
#include "narr/csv.hpp"
#include "narr/date.hpp"
#include "narr/gsdmm.hpp"

namespace narr::fixture {

struct Topic {
  std::string_view name;
  std::array<std::string_view, 16> words;
};

inline constexpr std::array<Topic, 4> kTopics{{
    {"Investment",
     {"invest", "investor", "portfolio", "fund", "price", "buy", "market", "trading", "trader", "profit",
      "returns", "asset", "hedge", "capital", "etf", "retail"}},
    {"Regulation",
     {"regulation", "regulator", "government", "sec", "law", "tax", "policy", "compliance", "senate",
      "license", "court", "ruling", "bill", "central", "authority", "legislation"}},
    {"Technology",
     {"blockchain", "network", "mining", "miner", "protocol", "node", "lightning", "developer", "code",
      "hashrate", "segwit", "scaling", "wallet", "transaction", "block", "software"}},
    {"Security",
     {"exchange", "hack", "withdrawal", "security", "breach", "attack", "custody", "password", "phishing",
      "vulnerability", "keys", "audit", "funds", "insolvency", "gox", "stolen"}},
}};

inline constexpr std::array<std::string_view, 12> kPositive{"good", "great", "bullish", "gains", "rally",
                                                            "optimistic", "surge", "adoption", "strong",
                                                            "recovery", "confident", "promising"};
inline constexpr std::array<std::string_view, 12> kNegative{"bad", "bearish", "crash", "fear", "panic", "losses",
                                                            "scam", "collapse", "worried", "plunge", "risky",
                                                            "uncertainty"};
inline constexpr std::array<std::string_view, 10> kFiller{"the", "is", "to", "and", "this", "for", "of", "we",
                                                          "are", "it"};

struct PricePlan {
  Day start = Day{std::chrono::year{2014} / 1 / 1};
  std::size_t n_days = 200;
  double base = std::log(600.0);
  std::size_t first_break = 70;
  double first_shift = 0.6;
  std::size_t second_break = 140;
  double second_shift = -0.9;
  double noise = 0.02;
};

struct Fixture {
  std::vector<RawPost> posts;
  std::vector<std::string> topics;  // generative topic per post, parallel to posts
  PriceSeries prices;
};

inline double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Fixture generate(std::uint64_t seed = 20140304, std::size_t n_posts = 500, const PricePlan& plan = {}) {
  Rng rng(seed);
  Fixture f;

  std::vector<PricePoint> points;
  for (std::size_t t = 0; t < plan.n_days; ++t) {
    double level = plan.base;
    if (t >= plan.first_break) level += plan.first_shift;
    if (t >= plan.second_break) level += plan.second_shift;
    points.push_back({plan.start + std::chrono::days{static_cast<int>(t)}, std::exp(level + plan.noise * normal(rng))});
  }
  f.prices = PriceSeries(std::move(points));

  // Posts cover days 40..159, spanning both regime changes.
  auto pick = [&](auto const& arr) { return arr[rng.below(arr.size())]; };
  for (std::size_t i = 0; i < n_posts; ++i) {
    std::string id = "p" + std::to_string(100000 + i);
    const std::size_t day = 40 + rng.below(120);
    const auto secs = static_cast<long long>(rng.below(86400));
    Instant ts = Instant{plan.start + std::chrono::days{static_cast<int>(day)}} + std::chrono::seconds{secs};

    // Every 25th post is a verbatim repost of the previous text.
    if (i % 25 == 24 && !f.posts.empty()) {
      f.posts.push_back({id, ts, f.posts.back().text});
      f.topics.push_back(f.topics.back());
      continue;
    }

    const std::size_t topic = rng.below(kTopics.size());
    // Sentiment leaning by regime: investment and technology track the price,
    // security and regulation run against it.
    const int regime = day < plan.first_break ? 0 : (day < plan.second_break ? 1 : 2);
    const double up = regime == 1 ? 0.8 : (regime == 2 ? 0.2 : 0.5);
    const double p_pos = (topic == 0 || topic == 2) ? up : 1.0 - up;

    std::vector<std::string> words;
    const std::size_t n_topic = 5 + rng.below(4);
    for (std::size_t w = 0; w < n_topic; ++w) words.emplace_back(pick(kTopics[topic].words));
    const std::size_t n_filler = 1 + rng.below(3);
    for (std::size_t w = 0; w < n_filler; ++w) words.emplace_back(pick(kFiller));
    const std::size_t n_sent = rng.below(3);
    for (std::size_t w = 0; w < n_sent; ++w)
      words.emplace_back(rng.uniform() < p_pos ? pick(kPositive) : pick(kNegative));
    if (rng.uniform() < 0.9) words.emplace_back("bitcoin");
    for (std::size_t w = words.size(); w > 1; --w) std::swap(words[w - 1], words[rng.below(w)]);

    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    if (!text.empty()) text[0] = static_cast<char>(text[0] - 'a' + 'A');
    if (rng.uniform() < 0.3) text += "!!";
    if (rng.uniform() < 0.4) text += " #Bitcoin #" + std::string(kTopics[topic].name);
    if (rng.uniform() < 0.3) text += " @coin_news" + std::to_string(rng.below(50));
    if (rng.uniform() < 0.3) text += " https://t.co/" + std::to_string(rng.next() % 1000000);
    if (rng.uniform() < 0.2) text += " $" + std::to_string(100 + rng.below(900)) + " 24/7";
    f.posts.push_back({id, ts, text});
    f.topics.emplace_back(kTopics[topic].name);
  }
  return f;
}

inline void write_posts_csv(std::ostream& out, const std::vector<RawPost>& posts) {
  out << "id,created_at,text\n";
  for (const auto& p : posts) write_csv_row(out, {p.id, format_timestamp(p.timestamp), p.text});
}

inline void write_prices_csv(std::ostream& out, const PriceSeries& prices) {
  out << "date,close\n";
  for (const auto& p : prices) write_csv_row(out, {format_date(p.date), format_double(p.close)});
}

inline void write_truth_csv(std::ostream& out, const Fixture& f) {
  out << "doc_id,topic\n";
  for (std::size_t i = 0; i < f.posts.size(); ++i) write_csv_row(out, {f.posts[i].id, f.topics[i]});
}

// Writes posts.csv, prices.csv and truth.csv into dir.
inline void write(const Fixture& f, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("posts.csv");
    write_posts_csv(out, f.posts);
  }
  {
    auto out = open("prices.csv");
    write_prices_csv(out, f.prices);
  }
  {
    auto out = open("truth.csv");
    write_truth_csv(out, f);
  }
}

}  // namespace narr::fixture
