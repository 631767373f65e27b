#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eventstudy.hpp"
#include "types.hpp"
#include "usergroups.hpp"

namespace fxp {

/// Levenshtein distance over Unicode scalar values (UTF-8 decoded; an invalid
/// byte counts as one unit).
std::int64_t edit_distance(std::string_view a, std::string_view b);

struct TypoRuleConfig {
  int max_following = 3;             // how many later tweets to examine
  std::int64_t min_exclusive = 1;    // match iff min_exclusive < d < max_exclusive
  std::int64_t max_exclusive = 4;
  bool url_normalize = true;         // compare with URLs collapsed to <url>
};

/// Finds a near-duplicate replacement among the author's next tweets: the
/// first of the next max_following tweets whose URL-normalized text sits at
/// edit distance in (min_exclusive, max_exclusive) from the deleted text.
/// "following" must be later tweets of the same author, time-ascending.
std::optional<std::string> detect_typo_deletion(const TweetRecord& deleted,
                                                std::span<const TweetRecord* const> following,
                                                const TypoRuleConfig& cfg);

struct RepostCluster {
  std::string author_id;
  std::string text;               // trailing whitespace trimmed
  std::vector<std::string> ids;   // >= 2, input order
};

/// Groups deleted tweets by exact (author, trailing-trimmed text); clusters of
/// size >= 2, ordered by count descending, then author, then text.
std::vector<RepostCluster> find_repost_clusters(std::span<const TweetRecord* const> deleted);

struct RecommendationLexicon {
  std::vector<std::string> words;
  static RecommendationLexicon defaults();
};

/// Case-insensitive whole-token match against the lexicon; tokens are maximal
/// letter runs, so "closed" never matches "close".
bool is_recommendation(std::string_view text, const RecommendationLexicon& lexicon);

/// Partition of the deleted set; categories are assigned in the fixed order
/// repost, typo, retweet, recommendation, unexplained.
struct DeletionBreakdown {
  std::int64_t total_deleted = 0;
  std::int64_t unique_deleted = 0;  // distinct (author, trimmed text) pairs
  std::vector<RepostCluster> repost_clusters;
  std::vector<std::pair<std::string, std::string>> typo_deletions;  // (deleted id, replacement id)
  std::vector<std::string> deleted_retweet_ids;
  std::vector<std::string> recommendation_ids;
  std::vector<std::string> unexplained_ids;

  std::int64_t repost_count() const {
    std::int64_t n = 0;
    for (const auto& c : repost_clusters) n += static_cast<std::int64_t>(c.ids.size());
    return n;
  }
};

DeletionBreakdown categorize_deletions(const std::vector<TweetRecord>& tweets,
                                       const TypoRuleConfig& typo_cfg,
                                       const RecommendationLexicon& lexicon);

/// Histogram bins for the per-user deleted fraction: exactly 0, ten
/// right-closed 10% steps with (90,100) open at the top, and exactly 100.
inline constexpr std::size_t kDeletionBins = 12;
extern const std::array<const char*, kDeletionBins> kDeletionBinLabels;
std::size_t deletion_bin(std::int64_t deleted, std::int64_t total);

struct ForensicsReport {
  DeletionBreakdown breakdown;
  // histogram[group][bin] = users of that group whose deleted fraction falls in the bin
  std::array<std::array<std::int64_t, kDeletionBins>, 5> histogram{};
  struct StanceCell {
    std::int64_t deleted = 0;
    std::int64_t total = 0;  // all tweets of that stance in the group
  };
  std::array<std::array<StanceCell, 3>, 5> stance_table{};  // [group][stance]
};

/// Breakdown plus the per-group deletion-fraction histogram and the deleted
/// stance table. stances must parallel tweets; group_of must cover every
/// author.
ForensicsReport forensics_report(const std::vector<TweetRecord>& tweets,
                                 std::span<const Stance> stances,
                                 const std::map<std::string, UserGroup>& group_of,
                                 const TypoRuleConfig& typo_cfg,
                                 const RecommendationLexicon& lexicon);

struct CarComparison {
  StudyResult all;       // every tweet participates in event classification
  StudyResult excluded;  // deleted tweets left out
};

/// Runs the event study twice over identical rates: once with all tweets and
/// once excluding deleted ones from event classification.
CarComparison car_removal_comparison(const std::vector<AnnouncementEvent>& events,
                                     const RateSeries& rates,
                                     std::span<const ClassifiedTweet> tweets_by_time,
                                     const GroupFilter& filter, const StudyConfig& cfg);

}  // namespace fxp
