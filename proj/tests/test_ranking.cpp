#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>

#include "evade/ranking.hpp"
#include "evade/rng.hpp"

using namespace evade;

namespace {
SyntheticResult mask_data() {
  SyntheticConfig cfg;
  cfg.n_samples = 1200;
  cfg.n_features = 200;
  cfg.n_signal = 40;
  cfg.flip_noise = 0.05;
  cfg.background_density = 0.1;
  cfg.seed = 29;
  return generate_synthetic(cfg);
}

FeatureRanking hand_ranking(std::vector<std::size_t> order,
                            std::vector<double> scores,
                            std::vector<double> bias) {
  FeatureRanking r;
  r.order = std::move(order);
  r.scores = std::move(scores);
  r.benign_bias = std::move(bias);
  return r;
}
}  // namespace

TEST_CASE("importance concentrates on the planted signal columns") {
  const auto synth = mask_data();
  std::set<std::size_t> truth(synth.benign_signal.begin(),
                              synth.benign_signal.end());
  truth.insert(synth.malware_signal.begin(), synth.malware_signal.end());
  REQUIRE(truth.size() == 40);

  const auto ranking = rank_features(synth.dataset, 40, 31);
  REQUIRE(ranking.size() == 200);
  REQUIRE(ranking.scores.size() == 200);
  REQUIRE(ranking.benign_bias.size() == 200);

  std::size_t hits = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    hits += truth.count(ranking.order[i]);
  }
  CHECK(hits >= 32);  // at least 80% of the top-40 are true signal

  // scores are a probability vector aligned with `order`
  double total = 0.0;
  for (double s : ranking.scores) {
    CHECK(s >= 0.0);
    total += s;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::is_sorted(ranking.scores.begin(), ranking.scores.end(),
                       std::greater<double>()));
}

TEST_CASE("benign bias carries the planted signal sign") {
  const auto synth = mask_data();
  std::set<std::size_t> benign(synth.benign_signal.begin(),
                               synth.benign_signal.end());
  std::set<std::size_t> malware(synth.malware_signal.begin(),
                                synth.malware_signal.end());
  const auto ranking = rank_features(synth.dataset, 40, 31);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const std::size_t f = ranking.order[i];
    if (benign.count(f)) CHECK(ranking.benign_bias[i] > 0.5);
    if (malware.count(f)) CHECK(ranking.benign_bias[i] < -0.5);
  }
}

TEST_CASE("constant columns score exactly zero") {
  Dataset d;
  d.vocabulary = std::make_shared<FeatureVocabulary>(
      std::vector<std::string>{"live", "dead_zero", "dead_one"});
  Rng rng(37);
  for (int i = 0; i < 60; ++i) {
    const std::uint8_t bit = rng.bernoulli(0.5) ? 1 : 0;
    d.samples.push_back(
        Sample{"s" + std::to_string(i), bit, BitVec{bit, 0, 1}});
  }
  const auto ranking = rank_features(d, 25, 41);
  REQUIRE(ranking.size() == 3);
  CHECK(ranking.order[0] == 0);
  for (std::size_t i = 0; i < 3; ++i) {
    if (ranking.order[i] != 0) CHECK(ranking.scores[i] == 0.0);
  }
}

TEST_CASE("ranking is deterministic for a fixed seed") {
  const auto synth = mask_data();
  const auto a = rank_features(synth.dataset, 20, 43);
  const auto b = rank_features(synth.dataset, 20, 43);
  CHECK(a.order == b.order);
  CHECK(a.scores == b.scores);
  const auto c = rank_features(synth.dataset, 20, 44);
  CHECK(a.order != c.order);  // different tree draws shuffle the tail
}

TEST_CASE("select_top restricts and renormalizes") {
  std::vector<std::size_t> order;
  std::vector<double> scores, bias;
  Rng rng(47);
  for (std::size_t i = 0; i < 1000; ++i) {
    order.push_back(i);
    scores.push_back(1000.0 - double(i));
    bias.push_back(rng.uniform01() - 0.5);
  }
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  for (auto& s : scores) s /= total;
  const auto ranking = hand_ranking(order, scores, bias);

  const auto top = select_top(ranking, 300);
  REQUIRE(top.size() == 300);
  CHECK(top.order[0] == 0);
  CHECK(top.order[299] == 299);
  double sum = 0.0;
  for (double s : top.scores) sum += s;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(top.benign_bias[7] == ranking.benign_bias[7]);

  // count >= size is the identity
  const auto all = select_top(ranking, 5000);
  CHECK(all.size() == 1000);
  CHECK(all.order == ranking.order);

  // count = 1 keeps the argmax with weight 1
  const auto one = select_top(ranking, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.order[0] == 0);
  CHECK(one.scores[0] == doctest::Approx(1.0));
}

TEST_CASE("lambda sets are ceil-sized prefixes of one permutation") {
  std::vector<std::size_t> order;
  std::vector<double> scores, bias;
  for (std::size_t i = 0; i < 300; ++i) {
    order.push_back(1000 + i);  // distinct from positions
    scores.push_back(1.0 / 300.0);
    bias.push_back(i % 2 ? 0.3 : -0.3);
  }
  const auto ranking = hand_ranking(order, scores, bias);

  for (const auto mode : {LambdaMode::random, LambdaMode::ranked_benign}) {
    const auto ten = lambda_features(ranking, 10.0, mode, 53);
    CHECK(ten.indices.size() == 30);
    CHECK(ten.lambda_percent == 10.0);
    std::set<std::size_t> seen(ten.indices.begin(), ten.indices.end());
    CHECK(seen.size() == 30);  // no duplicates
    for (std::size_t f : ten.indices) {
      CHECK(f >= 1000);
      CHECK(f < 1300);
    }

    // nested growth under one seed
    const auto twenty = lambda_features(ranking, 20.0, mode, 53);
    REQUIRE(twenty.indices.size() == 60);
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(twenty.indices[i] == ten.indices[i]);
    }

    // the full set is the whole subspace
    const auto full = lambda_features(ranking, 100.0, mode, 53);
    std::set<std::size_t> everything(full.indices.begin(), full.indices.end());
    CHECK(everything.size() == 300);

    // reproducible, and seed-sensitive
    const auto again = lambda_features(ranking, 10.0, mode, 53);
    CHECK(again.indices == ten.indices);
    const auto other = lambda_features(ranking, 10.0, mode, 54);
    CHECK(other.indices != ten.indices);
  }
}

TEST_CASE("tiny lambda still selects one feature") {
  std::vector<std::size_t> order{4, 2, 9};
  const auto ranking =
      hand_ranking(order, {0.5, 0.3, 0.2}, {0.1, 0.1, 0.1});
  const auto set = lambda_features(ranking, 0.01, LambdaMode::random, 1);
  CHECK(set.indices.size() == 1);
}

TEST_CASE("exact-boundary lambda avoids ceil overshoot") {
  std::vector<std::size_t> order;
  std::vector<double> scores, bias;
  for (std::size_t i = 0; i < 200; ++i) {
    order.push_back(i);
    scores.push_back(1.0 / 200.0);
    bias.push_back(0.0);
  }
  const auto ranking = hand_ranking(order, scores, bias);
  // 15% of 200 = 30 exactly; the epsilon guard must not bump it to 31
  const auto set = lambda_features(ranking, 15.0, LambdaMode::random, 3);
  CHECK(set.indices.size() == 30);
}

TEST_CASE("ranked_benign prefers benign-typical heavyweights") {
  const auto synth = mask_data();
  const auto ranking = select_top(rank_features(synth.dataset, 40, 31), 100);
  std::set<std::size_t> benign(synth.benign_signal.begin(),
                               synth.benign_signal.end());

  const auto set = lambda_features(ranking, 5.0, LambdaMode::ranked_benign, 59);
  REQUIRE(set.indices.size() == 5);
  std::size_t benign_hits = 0;
  for (std::size_t f : set.indices) benign_hits += benign.count(f);
  CHECK(benign_hits >= 4);  // at least 80% benign-indicative
}

TEST_CASE("invalid lambda values are rejected") {
  std::vector<std::size_t> order{0, 1};
  const auto ranking = hand_ranking(order, {0.6, 0.4}, {0.0, 0.0});
  CHECK_THROWS(lambda_features(ranking, 0.0, LambdaMode::random, 1));
  CHECK_THROWS(lambda_features(ranking, -3.0, LambdaMode::random, 1));
  CHECK_THROWS(lambda_features(ranking, 100.5, LambdaMode::random, 1));
}

TEST_CASE("rankings round-trip through disk") {
  const auto synth = mask_data();
  const auto ranking = select_top(rank_features(synth.dataset, 15, 61), 50);
  const auto path =
      (std::filesystem::temp_directory_path() / "evade_ranking_rt.json")
          .string();
  save_ranking(ranking, path);
  const auto back = load_ranking(path);
  CHECK(back.order == ranking.order);
  REQUIRE(back.scores.size() == ranking.scores.size());
  for (std::size_t i = 0; i < ranking.scores.size(); ++i) {
    CHECK(back.scores[i] == doctest::Approx(ranking.scores[i]).epsilon(1e-12));
    CHECK(back.benign_bias[i] ==
          doctest::Approx(ranking.benign_bias[i]).epsilon(1e-12));
  }
  std::filesystem::remove(path);
}
