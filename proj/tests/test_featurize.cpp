#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "featurize.hpp"
#include "types.hpp"

using namespace fxp;

namespace {

// Independent FNV-1a 64 (constants written out, not shared with the library).
std::uint64_t ref_fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h = (h ^ c) * 0x100000001b3ull;
  }
  return h;
}

// Recomputes the hashed bag-of-ngrams vector from a token list the slow way.
FeatureVector ref_vector(const std::vector<std::string>& tokens, std::uint32_t dim) {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : tokens) counts[ref_fnv(t) % dim] += 1.0;
  for (std::size_t i = 1; i < tokens.size(); ++i)
    counts[ref_fnv(tokens[i - 1] + "_" + tokens[i]) % dim] += 1.0;
  double sq = 0.0;
  for (const auto& [k, v] : counts) sq += v * v;
  FeatureVector out;
  out.dim = dim;
  if (sq > 0.0)
    for (const auto& [k, v] : counts) out.entries.emplace_back(k, v / std::sqrt(sq));
  return out;
}

double norm2(const FeatureVector& v) {
  double sq = 0.0;
  for (const auto& [idx, w] : v.entries) sq += w * w;
  return std::sqrt(sq);
}

}  // namespace

TEST_CASE("tokenize: frozen examples") {
  CHECK(tokenize("Buy EURUSD now! https://x.co/a @joe $EURUSD #fx") ==
        std::vector<std::string>{"buy", "eurusd", "now", "<url>", "<user>", "$eurusd", "#fx"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("!!! ???") == std::vector<std::string>{});
  CHECK(tokenize("WWW.Example.COM/page rocks") ==
        std::vector<std::string>{"<url>", "rocks"});
  CHECK(tokenize("snake_case and 1.25 numbers") ==
        std::vector<std::string>{"snake_case", "and", "1", "25", "numbers"});
  CHECK(tokenize("@Trader_1x said so") == std::vector<std::string>{"<user>", "said", "so"});
  CHECK(tokenize("target   spaced\ttabs\nnewline") ==
        std::vector<std::string>{"target", "spaced", "tabs", "newline"});
}

TEST_CASE("tokenize: every URL and mention maps to the same placeholder") {
  const auto a = tokenize("check https://a.example/b?q=1 out says @alice");
  const auto b = tokenize("check www.zzz.io/deep/path out says @bob99");
  CHECK(a == b);
  CHECK(a == std::vector<std::string>{"check", "<url>", "out", "says", "<user>"});
  // Consequently the hashed vectors are identical too.
  CHECK(featurize("check https://a.example/b?q=1 out says @alice", 1024) ==
        featurize("check www.zzz.io/deep/path out says @bob99", 1024));
}

TEST_CASE("fnv1a64: frozen reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  // Cross-check the independent copy on arbitrary strings.
  for (const std::string s : {"", "a", "foobar", "eurusd", "<url>", "going_long", "$eurusd"})
    CHECK(fnv1a64(s) == ref_fnv(s));
}

TEST_CASE("featurize: dimension must be a power of two >= 1024") {
  for (std::uint32_t bad : {0u, 1u, 512u, 1023u, 1025u, 1536u, 100000u}) {
    CHECK_THROWS_AS(featurize("x", bad), Error);
    try {
      featurize("x", bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_argument);
    }
  }
  for (std::uint32_t good : {1024u, 2048u, 65536u, 1u << 20}) {
    CHECK_NOTHROW(featurize("x", good));
    CHECK(featurize("x", good).dim == good);
  }
}

TEST_CASE("featurize: norm is 1 for non-empty text and 0 for empty") {
  for (const char* text : {"buy", "buy euro now", "a b c d e f g", "$eurusd #fx @u http://x.y"}) {
    const FeatureVector v = featurize(text, 4096);
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(featurize("", 4096).entries.empty());
  CHECK(featurize("  \t ?! ", 4096).entries.empty());
  CHECK(norm2(featurize("", 4096)) == 0.0);
}

TEST_CASE("featurize: repeated token accumulates counts before normalizing") {
  // "x x" -> unigram x twice, bigram x_x once: weights (2,1)/sqrt(5).
  const FeatureVector v = featurize("x x", 1024);
  const auto ix = static_cast<std::uint32_t>(ref_fnv("x") % 1024);
  const auto ixx = static_cast<std::uint32_t>(ref_fnv("x_x") % 1024);
  REQUIRE(ix != ixx);
  REQUIRE(v.entries.size() == 2);
  double wx = 0.0, wxx = 0.0;
  for (const auto& [idx, w] : v.entries) {
    if (idx == ix) wx = w;
    if (idx == ixx) wxx = w;
  }
  CHECK(wx == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(wxx == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("featurize: matches an independent recomputation exactly") {
  const std::vector<std::string> texts = {
      "Buy EURUSD now! https://x.co/a @joe $EURUSD #fx",
      "going long eurusd this morning target 10500",
      "sell sell sell the euro weakness continues",
      "mixed session, watching ranges",
      "a a a a b b c",
      "one",
      "",
      "RT @bot: automated signal eur/usd 1.1043",
  };
  for (std::uint32_t dim : {1024u, 65536u}) {
    for (const auto& text : texts) {
      CAPTURE(text);
      const FeatureVector got = ref_vector(tokenize(text), dim);
      const FeatureVector want = featurize(text, dim);
      REQUIRE(got.entries.size() == want.entries.size());
      for (std::size_t i = 0; i < got.entries.size(); ++i) {
        CHECK(got.entries[i].first == want.entries[i].first);
        CHECK(got.entries[i].second == doctest::Approx(want.entries[i].second).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("featurize: entries are sorted by index and unique") {
  const FeatureVector v =
      featurize("the quick brown fox jumps over the lazy dog again and again", 1024);
  for (std::size_t i = 1; i < v.entries.size(); ++i)
    CHECK(v.entries[i - 1].first < v.entries[i].first);
  for (const auto& [idx, w] : v.entries) {
    CHECK(idx < 1024);
    CHECK(w > 0.0);
  }
}

TEST_CASE("featurize: colliding tokens share a bucket") {
  // Hunt for two distinct unigrams that land in the same 1024-wide bucket.
  std::string a, b;
  std::map<std::uint32_t, std::string> seen;
  for (int i = 0; i < 5000 && a.empty(); ++i) {
    std::string tok = "tok" + std::to_string(i);
    auto [it, fresh] = seen.try_emplace(static_cast<std::uint32_t>(ref_fnv(tok) % 1024), tok);
    if (!fresh) {
      a = it->second;
      b = tok;
    }
  }
  REQUIRE(!a.empty());
  const FeatureVector va = featurize(a, 1024);
  const FeatureVector vb = featurize(b, 1024);
  REQUIRE(va.entries.size() == 1);
  CHECK(va.entries == vb.entries);
}

TEST_CASE("dot: sparse-dense inner product") {
  const FeatureVector v = featurize("x x", 1024);
  std::vector<double> w(1024, 0.0);
  w[ref_fnv("x") % 1024] = 2.0;
  w[ref_fnv("x_x") % 1024] = -1.0;
  CHECK(dot(v, w) == doctest::Approx(3.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(dot(featurize("", 1024), w) == 0.0);
}

TEST_CASE("featurize: deterministic across calls") {
  const char* text = "going long eurusd target 10842 via http://sig.nal @desk";
  CHECK(featurize(text, 2048) == featurize(text, 2048));
}
