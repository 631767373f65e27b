#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "featurize.hpp"
#include "stance.hpp"
#include "types.hpp"

using namespace fxp;

namespace {

Confusion make_confusion(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  Confusion c{};
  int g = 0;
  for (const auto& row : rows) {
    int p = 0;
    for (std::int64_t v : row) c[g][p++] = v;
    ++g;
  }
  return c;
}

std::vector<LabeledVector> separable_corpus(std::uint32_t dim) {
  const std::pair<const char*, Stance> samples[] = {
      {"bearish sell short euro weakness", Stance::Sell},
      {"dump the euro sell into rallies", Stance::Sell},
      {"short eurusd downtrend intact", Stance::Sell},
      {"sideways hold flat range today", Stance::Hold},
      {"waiting on the sidelines no position", Stance::Hold},
      {"range bound session hold fire", Stance::Hold},
      {"bullish buy long euro strength", Stance::Buy},
      {"buy the dip going long eurusd", Stance::Buy},
      {"long eurusd breakout confirmed buy", Stance::Buy},
  };
  std::vector<LabeledVector> out;
  for (const auto& [text, y] : samples) out.push_back({featurize(text, dim), y});
  return out;
}

std::vector<CvExample> separable_series(std::size_t n) {
  const char* texts[3] = {"bearish sell short euro weakness", "sideways hold flat range today",
                          "bullish buy long euro strength"};
  const Stance ys[3] = {Stance::Sell, Stance::Hold, Stance::Buy};
  std::vector<CvExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    CvExample e;
    e.t = 1000000 + static_cast<Timestamp>(i) * 60;
    e.x = featurize(texts[i % 3], 1024);
    e.y = ys[i % 3];
    out.push_back(std::move(e));
  }
  return out;
}

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::internal;
}

}  // namespace

TEST_CASE("decide: full rule table") {
  CHECK(decide({1.0, -1.0}) == Stance::Buy);
  CHECK(decide({-1.0, 1.0}) == Stance::Sell);
  CHECK(decide({-1.0, -1.0}) == Stance::Hold);
  CHECK(decide({0.0, 0.0}) == Stance::Hold);       // zero is not positive
  CHECK(decide({0.0, -1.0}) == Stance::Hold);
  CHECK(decide({-1.0, 0.0}) == Stance::Hold);
  CHECK(decide({1e-12, 0.0}) == Stance::Buy);      // any positive margin counts
  CHECK(decide({0.0, 1e-12}) == Stance::Sell);
  CHECK(decide({2.0, 1.0}) == Stance::Buy);        // both positive: larger wins
  CHECK(decide({1.0, 2.0}) == Stance::Sell);
  CHECK(decide({1.5, 1.5}) == Stance::Hold);       // exact tie
}

TEST_CASE("decide: invariant under scaling both scores by any positive factor") {
  std::mt19937_64 rng(2024);
  auto unit = [&rng] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 4.0 - 2.0; };
  const double scales[] = {1e-8, 1e-3, 1.0, 1e3, 1e8};
  for (int i = 0; i < 200; ++i) {
    const PlaneScores s{unit(), unit()};
    const Stance base = decide(s);
    for (double lambda : scales) {
      CHECK(decide({s.buy * lambda, s.sell * lambda}) == base);
    }
  }
}

TEST_CASE("training separates a vocabulary-disjoint corpus") {
  const auto data = separable_corpus(1024);
  std::vector<std::string> warnings;
  const TwoPlaneModel m = train_two_plane(data, {}, &warnings);
  CHECK(warnings.empty());
  CHECK(m.dim == 1024);
  CHECK(m.params.lambda == 1e-4);
  CHECK(m.params.epochs == 10);
  CHECK(m.params.seed == 42);
  for (const auto& ex : data) CHECK(classify_stance(m, ex.x) == ex.y);
}

TEST_CASE("training is deterministic for fixed data and params") {
  const auto data = separable_corpus(1024);
  const TwoPlaneModel a = train_two_plane(data, {});
  const TwoPlaneModel b = train_two_plane(data, {});
  CHECK(a.buy.weights == b.buy.weights);
  CHECK(a.sell.weights == b.sell.weights);
  CHECK(a.buy.bias == b.buy.bias);
  CHECK(a.sell.bias == b.sell.bias);
  const TwoPlaneModel c = train_two_plane(data, {1e-4, 10, 43});
  CHECK(a.buy.weights != c.buy.weights);  // seed participates
}

TEST_CASE("training warns about absent stances") {
  std::vector<LabeledVector> data = {{featurize("quiet market", 1024), Stance::Hold},
                                     {featurize("still flat", 1024), Stance::Hold}};
  std::vector<std::string> warnings;
  train_two_plane(data, {}, &warnings);
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0] == "no sell examples in training data");
  CHECK(warnings[1] == "no buy examples in training data");
}

TEST_CASE("training rejects bad parameters and inconsistent data") {
  const auto data = separable_corpus(1024);
  try {
    train_two_plane(data, {0.0, 10, 42});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()) == "lambda must be > 0");
  }
  try {
    train_two_plane(data, {1e-4, 0, 42});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "epochs must be > 0");
  }
  CHECK(thrown_code([] { train_two_plane({}, {}); }) == Errc::invalid_argument);

  std::vector<LabeledVector> mixed = {{featurize("a", 1024), Stance::Hold},
                                      {featurize("b", 2048), Stance::Hold}};
  try {
    train_two_plane(mixed, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "training vectors disagree on feature dimension");
  }
}

TEST_CASE("plane_scores rejects a dimension mismatch") {
  const TwoPlaneModel m = train_two_plane(separable_corpus(1024), {});
  CHECK(thrown_code([&] { plane_scores(m, featurize("x", 2048)); }) == Errc::invalid_argument);
}

TEST_CASE("accuracy and F1 against a hand-computed confusion") {
  // Rows are gold, columns predicted, both in (sell, hold, buy) index order.
  const Confusion c = make_confusion({{7, 3, 0}, {0, 9, 1}, {0, 2, 8}});
  CHECK(accuracy_from(c) == doctest::Approx(0.8).epsilon(1e-15));
  // Buy: tp=8 fp=1 fn=2 -> F1 = 16/19. Sell: tp=7 fp=0 fn=3 -> F1 = 14/17.
  const double expect = 0.5 * (16.0 / 19.0 + 14.0 / 17.0);
  CHECK(expect == doctest::Approx(0.8328173374613003).epsilon(1e-15));
  CHECK(f1_buy_sell(c) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("accuracy and F1 degrade gracefully on empty counts") {
  const Confusion zero{};
  CHECK(accuracy_from(zero) == 0.0);
  CHECK(f1_buy_sell(zero) == 0.0);
  // Gold all hold, predicted all hold: both directional classes empty -> 0.
  const Confusion holds = make_confusion({{0, 0, 0}, {0, 5, 0}, {0, 0, 0}});
  CHECK(accuracy_from(holds) == 1.0);
  CHECK(f1_buy_sell(holds) == 0.0);
}

TEST_CASE("accuracy and F1 are invariant under scaling all counts") {
  const Confusion c = make_confusion({{7, 3, 0}, {0, 9, 1}, {0, 2, 8}});
  Confusion c3{};
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) c3[g][p] = 3 * c[g][p];
  CHECK(accuracy_from(c) == accuracy_from(c3));
  CHECK(f1_buy_sell(c) == f1_buy_sell(c3));
}

TEST_CASE("model save/load round-trips bit-exactly") {
  const TwoPlaneModel m = train_two_plane(separable_corpus(1024), {3e-4, 7, 99});
  std::ostringstream out;
  save_model(m, out);
  std::istringstream in(out.str());
  const TwoPlaneModel r = load_model(in);
  CHECK(r.dim == m.dim);
  CHECK(r.params.lambda == m.params.lambda);
  CHECK(r.params.epochs == m.params.epochs);
  CHECK(r.params.seed == m.params.seed);
  CHECK(r.buy.bias == m.buy.bias);
  CHECK(r.sell.bias == m.sell.bias);
  CHECK(r.buy.weights == m.buy.weights);
  CHECK(r.sell.weights == m.sell.weights);

  // Saving the reloaded model reproduces the identical file.
  std::ostringstream out2;
  save_model(r, out2);
  CHECK(out2.str() == out.str());

  for (const char* text : {"bullish buy long euro strength", "sideways hold flat range today"}) {
    const FeatureVector v = featurize(text, 1024);
    CHECK(classify_stance(r, v) == classify_stance(m, v));
  }
}

TEST_CASE("model loading rejects malformed input with parse errors") {
  auto load_err = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_model(in);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse);
      return std::string(e.what());
    }
    FAIL("expected throw");
    return std::string();
  };
  const std::string header = "twoplane v1 D=1024 lambda=0.0001 epochs=10 seed=42\n";
  CHECK(load_err("") == "model: empty input");
  CHECK(load_err("nonsense\n").rfind("model: bad header", 0) == 0);
  CHECK(load_err("twoplane v2 D=1024 lambda=0.0001 epochs=10 seed=42\n")
            .rfind("model: bad header", 0) == 0);
  CHECK(load_err(header + "wat 3 0.5\n") == "model: unknown line tag \"wat\" at line 2");
  CHECK(load_err(header + "buy_bias 0\nsell_bias 0\nbuy 1024 0.5\n") ==
        "model: index out of range at line 4");
  CHECK(load_err(header + "buy_bias 0.1\n") == "model: missing bias line(s)");
  CHECK(load_err(header + "buy_bias abc\n") == "model: bad number in line 2");
  CHECK(load_err(header + "buy 3\n") == "model: short line at line 2");
}

TEST_CASE("blocked_cv: fold layout, contiguity and pooled counts") {
  const auto data = separable_series(10);
  const EvalReport r = blocked_cv(data, 3, {});
  REQUIRE(r.folds.size() == 3);
  // 10 = 4 + 3 + 3, larger blocks first.
  CHECK(r.folds[0].begin == 0);
  CHECK(r.folds[0].end == 4);
  CHECK(r.folds[1].begin == 4);
  CHECK(r.folds[1].end == 7);
  CHECK(r.folds[2].begin == 7);
  CHECK(r.folds[2].end == 10);
  for (const auto& f : r.folds) {
    CHECK(f.t_first == data[f.begin].t);
    CHECK(f.t_last == data[f.end - 1].t);
    CHECK(f.t_first <= f.t_last);
  }
  Confusion sum{};
  std::int64_t total = 0;
  for (const auto& f : r.folds)
    for (int g = 0; g < 3; ++g)
      for (int p = 0; p < 3; ++p) sum[g][p] += f.confusion[g][p];
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) {
      CHECK(sum[g][p] == r.pooled[g][p]);
      total += r.pooled[g][p];
    }
  CHECK(total == 10);  // every example tested exactly once
}

TEST_CASE("blocked_cv: separable data scores high") {
  const EvalReport r = blocked_cv(separable_series(30), 5, {});
  CHECK(r.accuracy_mean >= 0.95);
  CHECK(r.f1_mean >= 0.95);
}

TEST_CASE("blocked_cv: equal-size folds make mean accuracy equal pooled accuracy") {
  const EvalReport r = blocked_cv(separable_series(12), 3, {});
  for (const auto& f : r.folds) CHECK(f.end - f.begin == 4);
  CHECK(r.accuracy_mean == doctest::Approx(accuracy_from(r.pooled)).epsilon(1e-12));
}

TEST_CASE("blocked_cv: deterministic") {
  const auto data = separable_series(20);
  const EvalReport a = blocked_cv(data, 4, {});
  const EvalReport b = blocked_cv(data, 4, {});
  CHECK(a.accuracy_mean == b.accuracy_mean);
  CHECK(a.f1_mean == b.f1_mean);
  CHECK(a.pooled == b.pooled);
  CHECK(a.notes == b.notes);
}

TEST_CASE("blocked_cv: notes report empty classes") {
  std::vector<CvExample> data;
  for (std::size_t i = 0; i < 8; ++i) {
    CvExample e;
    e.t = static_cast<Timestamp>(i);
    e.x = featurize("nothing to see here", 1024);
    e.y = Stance::Hold;
    data.push_back(std::move(e));
  }
  const EvalReport r = blocked_cv(data, 2, {});
  bool saw_warning = false, saw_empty = false;
  for (const auto& n : r.notes) {
    if (n == "fold 0: no buy examples in training data") saw_warning = true;
    if (n == "fold 0: class buy empty in test block, F1 contribution 0") saw_empty = true;
  }
  CHECK(saw_warning);
  CHECK(saw_empty);
}

TEST_CASE("blocked_cv: input validation") {
  const auto data = separable_series(10);
  try {
    blocked_cv(data, 1, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()) == "fold count must be >= 2");
  }
  try {
    blocked_cv(separable_series(3), 4, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "need at least one example per fold");
  }
  auto shuffled = data;
  std::swap(shuffled[2], shuffled[7]);
  try {
    blocked_cv(shuffled, 3, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()).find("must be sorted by time") != std::string::npos);
  }
}
