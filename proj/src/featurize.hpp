#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "types.hpp"

namespace fxp {

/// Sparse L2-normalized bag of hashed unigrams + bigrams. Entries are sorted
/// by index and unique; dim records the hash-space size the indices live in.
struct FeatureVector {
  std::uint32_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool operator==(const FeatureVector&) const = default;
};

/// Replaces every URL (http://, https:// or www. up to whitespace) with the
/// fixed token "<url>". Case-insensitive scheme match; the rest of the text is
/// left untouched.
std::string normalize_urls(std::string_view text);

/// Lowercases, maps URLs to "<url>" and @mentions to "<user>", then splits
/// into tokens of [a-z0-9_$#<>]. Cashtags like "$eurusd" survive as single
/// tokens.
std::vector<std::string> tokenize(std::string_view text);

/// FNV-1a 64-bit. The published hash for feature indexing: a token lands in
/// bucket fnv1a64(token) % dim.
std::uint64_t fnv1a64(std::string_view s);

/// Hashes unigrams and bigrams ("a_b") into dim buckets and L2-normalizes.
/// dim must be a power of two and at least 1024. Empty text gives the zero
/// vector (norm 0); every other vector has norm 1.
FeatureVector featurize(std::string_view text, std::uint32_t dim);

double dot(const FeatureVector& v, const std::vector<double>& w);

}  // namespace fxp
