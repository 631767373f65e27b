#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stance.hpp"
#include "types.hpp"

namespace fxp {

enum class UserGroup { TradingRobot = 0, Spammer = 1, TradingCompany = 2, IndividualTrader = 3, Other = 4 };

constexpr int group_index(UserGroup g) { return static_cast<int>(g); }
const char* to_string(UserGroup g);                       // short name: robot, spammer, ...
std::optional<UserGroup> group_from_string(std::string_view s);

/// Thresholds and bot-text prefixes for the segmentation rules. All
/// comparisons in the rules are strict.
struct GroupRuleConfig {
  std::vector<std::string> bot_patterns;
  double bot_rate = 0.75;
  std::int64_t spam_tweets = 1000;
  double spam_retweeted_ratio = 0.01;
  std::int64_t company_days = 30;
  double company_t_rate = 0.5;
  double company_retweeted_ratio = 0.25;
  std::int64_t individual_days = 30;
  double individual_retweeted_ratio = 0.05;

  static GroupRuleConfig defaults();
};

struct UserProfile {
  std::string author_id;
  std::int64_t tweets = 0;
  std::int64_t days_active = 0;        // calendar days, first to last inclusive
  std::int64_t retweeted = 0;          // tweets with retweet_count > 0
  std::int64_t bot_pattern_tweets = 0;

  double t_rate() const { return tweets > 0 ? static_cast<double>(tweets) / static_cast<double>(days_active) : 0.0; }
  double retweeted_ratio() const { return tweets > 0 ? static_cast<double>(retweeted) / static_cast<double>(tweets) : 0.0; }
  double t_bot_rate() const { return tweets > 0 ? static_cast<double>(bot_pattern_tweets) / static_cast<double>(tweets) : 0.0; }
};

/// Whether the text starts with one of the bot prefixes, case-sensitively,
/// after trimming leading whitespace.
bool matches_bot_pattern(std::string_view text, const GroupRuleConfig& cfg);

/// All tweets must belong to one author; empty input is an error.
UserProfile build_profile(std::span<const TweetRecord* const> tweets, const GroupRuleConfig& cfg);
UserProfile build_profile(std::span<const TweetRecord> tweets, const GroupRuleConfig& cfg);

/// First matching rule wins: robot, spammer, company, individual, other.
UserGroup classify_user(const UserProfile& p, const GroupRuleConfig& cfg);

std::map<std::string, UserProfile> build_profiles(const std::vector<TweetRecord>& tweets,
                                                  const GroupRuleConfig& cfg);

struct GroupStats {
  std::int64_t users = 0;
  std::int64_t tweets = 0;
  std::array<std::int64_t, 3> stance_counts{};  // indexed by stance_index
  double user_share = 0.0;
  double tweet_share = 0.0;
};

struct GroupReport {
  std::array<GroupStats, 5> groups{};  // indexed by group_index
  std::int64_t total_users = 0;
  std::int64_t total_tweets = 0;
};

/// Shares of users and tweets per group, plus the distribution of
/// model-predicted stances inside each group. Every tweet author must have a
/// profile.
GroupReport group_report(const std::map<std::string, UserProfile>& profiles,
                         const std::vector<TweetRecord>& tweets, const TwoPlaneModel& model,
                         const GroupRuleConfig& cfg);

}  // namespace fxp
