// narr: narrative sentiment pipeline driver.
//
//   narr <breaks|stopwords|preprocess|cluster|sentiment|series|run> [options]
//   narr fixture --out-dir DIR
//
// Settings come from defaults, then --config FILE, then command-line flags.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "narr/fixture.hpp"
#include "narr/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir, posts, prices, scores, stopwords, label_map;
  std::vector<std::string> overrides;
};

narr::PipelineConfig resolve(const Flags& f) {
  narr::PipelineConfig cfg;
  if (!f.config.empty()) narr::apply_config_file(cfg, f.config);
  for (const auto& kv : f.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw narr::Error("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.gsdmm.seed = *f.seed;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.posts.empty()) cfg.posts = f.posts;
  if (!f.prices.empty()) cfg.prices = f.prices;
  if (!f.scores.empty()) cfg.scores = f.scores;
  if (!f.stopwords.empty()) cfg.stopwords = f.stopwords;
  if (!f.label_map.empty()) cfg.label_map = f.label_map;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrative extraction and sentiment time series from short posts"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "key = value configuration file");
  app.add_option("--seed", flags.seed, "sampler seed");
  app.add_option("--out-dir", flags.out_dir, "output directory");
  app.add_option("--posts", flags.posts, "posts file (.csv or .jsonl)");
  app.add_option("--prices", flags.prices, "price CSV (date,close)");
  app.add_option("--scores", flags.scores, "precomputed sentiment CSV (doc_id,pos,neg,neu)");
  app.add_option("--stopwords", flags.stopwords, "stopword file to use instead of <out-dir>/stopwords.txt");
  app.add_option("--label-map", flags.label_map, "cluster_id=label file");
  app.add_option("--set", flags.overrides, "override any configuration key (key=value)");

  auto* breaks = app.add_subcommand("breaks", "detect structural breaks in log price");
  auto* stop = app.add_subcommand("stopwords", "build the stopword list (base + manual + TF-IDF)");
  auto* prep = app.add_subcommand("preprocess", "clean, tokenize, filter and stem posts");
  auto* cluster = app.add_subcommand("cluster", "fit the GSDMM clustering");
  auto* sent = app.add_subcommand("sentiment", "score posts");
  auto* series = app.add_subcommand("series", "daily narrative series, summaries and correlations");
  auto* run = app.add_subcommand("run", "all stages in order");
  auto* fixture = app.add_subcommand("fixture", "write the synthetic demo data set");
  std::uint64_t fixture_seed = 20140304;
  std::size_t fixture_posts = 500;
  fixture->add_option("--fixture-seed", fixture_seed, "generator seed");
  fixture->add_option("--count", fixture_posts, "number of posts");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = resolve(flags);
    auto& log = std::cerr;
    if (*breaks) narr::cmd_breaks(cfg, log);
    else if (*stop) narr::cmd_stopwords(cfg, log);
    else if (*prep) narr::cmd_preprocess(cfg, log);
    else if (*cluster) narr::cmd_cluster(cfg, log);
    else if (*sent) narr::cmd_sentiment(cfg, log);
    else if (*series) narr::cmd_series(cfg, log);
    else if (*run) narr::cmd_run(cfg, log);
    else if (*fixture) {
      narr::fixture::write(narr::fixture::generate(fixture_seed, fixture_posts), cfg.out_dir);
      log << "fixture written to " << cfg.out_dir.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "narr: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
