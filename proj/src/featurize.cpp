#include "featurize.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <regex>

#include "util.hpp"

namespace fxp {

namespace {

const std::regex& url_regex() {
  static const std::regex re(R"((https?://[^\s]+|www\.[^\s]+))",
                             std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return re;
}

const std::regex& mention_regex() {
  static const std::regex re(R"(@\w+)", std::regex::ECMAScript | std::regex::optimize);
  return re;
}

}  // namespace

std::string normalize_urls(std::string_view text) {
  return std::regex_replace(std::string(text), url_regex(), "<url>");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::string s = ascii_lower(text);
  s = std::regex_replace(s, url_regex(), "<url>");
  s = std::regex_replace(s, mention_regex(), "<user>");
  std::vector<std::string> tokens;
  std::string cur;
  auto is_token_char = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '$' ||
           c == '#' || c == '<' || c == '>';
  };
  for (unsigned char c : s) {
    if (is_token_char(c)) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

FeatureVector featurize(std::string_view text, std::uint32_t dim) {
  if (dim < 1024 || !std::has_single_bit(dim))
    throw Error(Errc::invalid_argument,
                "feature dimension must be a power of two >= 1024, got " + std::to_string(dim));
  const auto tokens = tokenize(text);
  std::map<std::uint32_t, double> acc;  // ordered keys -> sorted entries
  const std::uint64_t mask = dim - 1;
  for (const auto& t : tokens) acc[static_cast<std::uint32_t>(fnv1a64(t) & mask)] += 1.0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string bigram = tokens[i] + "_" + tokens[i + 1];
    acc[static_cast<std::uint32_t>(fnv1a64(bigram) & mask)] += 1.0;
  }
  FeatureVector v;
  v.dim = dim;
  double sq = 0.0;
  for (const auto& [idx, w] : acc) sq += w * w;
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    v.entries.reserve(acc.size());
    for (const auto& [idx, w] : acc) v.entries.emplace_back(idx, w * inv);
  }
  return v;
}

double dot(const FeatureVector& v, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& [idx, val] : v.entries) s += w[idx] * val;
  return s;
}

}  // namespace fxp
