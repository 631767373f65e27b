#include "usergroups.hpp"

#include <algorithm>

#include "timeutil.hpp"
#include "util.hpp"

namespace fxp {

const char* to_string(UserGroup g) {
  switch (g) {
    case UserGroup::TradingRobot: return "robot";
    case UserGroup::Spammer: return "spammer";
    case UserGroup::TradingCompany: return "company";
    case UserGroup::IndividualTrader: return "individual";
    case UserGroup::Other: return "other";
  }
  return "?";
}

std::optional<UserGroup> group_from_string(std::string_view s) {
  if (s == "robot") return UserGroup::TradingRobot;
  if (s == "spammer") return UserGroup::Spammer;
  if (s == "company") return UserGroup::TradingCompany;
  if (s == "individual") return UserGroup::IndividualTrader;
  if (s == "other") return UserGroup::Other;
  return std::nullopt;
}

GroupRuleConfig GroupRuleConfig::defaults() {
  GroupRuleConfig cfg;
  cfg.bot_patterns = {"Closed Buy", "Closed Sell", "Buy stop",   "Sell stop",
                      "Buy limit",  "Sell limit",  "Opened Buy", "Opened Sell"};
  return cfg;
}

bool matches_bot_pattern(std::string_view text, const GroupRuleConfig& cfg) {
  const std::string_view t = trim_left(text);
  for (const auto& p : cfg.bot_patterns)
    if (t.substr(0, p.size()) == p) return true;
  return false;
}

UserProfile build_profile(std::span<const TweetRecord* const> tweets, const GroupRuleConfig& cfg) {
  if (tweets.empty()) throw Error(Errc::invalid_argument, "cannot profile an empty tweet set");
  UserProfile p;
  p.author_id = tweets.front()->author_id;
  std::int64_t first_day = 0, last_day = 0;
  bool first = true;
  for (const TweetRecord* t : tweets) {
    if (t->author_id != p.author_id)
      throw Error(Errc::invalid_argument, "profile input mixes authors: " + p.author_id + " vs " +
                                              t->author_id);
    ++p.tweets;
    if (t->retweet_count > 0) ++p.retweeted;
    if (matches_bot_pattern(t->text, cfg)) ++p.bot_pattern_tweets;
    const std::int64_t day = utc_day(t->timestamp);
    if (first) {
      first_day = last_day = day;
      first = false;
    } else {
      first_day = std::min(first_day, day);
      last_day = std::max(last_day, day);
    }
  }
  p.days_active = last_day - first_day + 1;
  return p;
}

UserProfile build_profile(std::span<const TweetRecord> tweets, const GroupRuleConfig& cfg) {
  std::vector<const TweetRecord*> ptrs;
  ptrs.reserve(tweets.size());
  for (const auto& t : tweets) ptrs.push_back(&t);
  return build_profile(std::span<const TweetRecord* const>(ptrs), cfg);
}

UserGroup classify_user(const UserProfile& p, const GroupRuleConfig& cfg) {
  if (p.t_bot_rate() > cfg.bot_rate) return UserGroup::TradingRobot;
  if (p.tweets > cfg.spam_tweets && p.retweeted_ratio() < cfg.spam_retweeted_ratio)
    return UserGroup::Spammer;
  if (p.days_active > cfg.company_days && p.t_rate() > cfg.company_t_rate &&
      p.retweeted_ratio() > cfg.company_retweeted_ratio)
    return UserGroup::TradingCompany;
  if (p.days_active > cfg.individual_days && p.retweeted_ratio() > cfg.individual_retweeted_ratio)
    return UserGroup::IndividualTrader;
  return UserGroup::Other;
}

std::map<std::string, UserProfile> build_profiles(const std::vector<TweetRecord>& tweets,
                                                  const GroupRuleConfig& cfg) {
  std::map<std::string, std::vector<const TweetRecord*>> by_author;
  for (const auto& t : tweets) by_author[t.author_id].push_back(&t);
  std::map<std::string, UserProfile> profiles;
  for (const auto& [author, list] : by_author)
    profiles.emplace(author, build_profile(std::span<const TweetRecord* const>(list), cfg));
  return profiles;
}

GroupReport group_report(const std::map<std::string, UserProfile>& profiles,
                         const std::vector<TweetRecord>& tweets, const TwoPlaneModel& model,
                         const GroupRuleConfig& cfg) {
  GroupReport report;
  std::map<std::string, UserGroup> group_of;
  for (const auto& [author, profile] : profiles) {
    const UserGroup g = classify_user(profile, cfg);
    group_of.emplace(author, g);
    ++report.groups[group_index(g)].users;
  }
  std::vector<std::string> missing;
  for (const auto& t : tweets) {
    auto it = group_of.find(t.author_id);
    if (it == group_of.end()) {
      if (missing.empty() || missing.back() != t.author_id) missing.push_back(t.author_id);
      continue;
    }
    auto& stats = report.groups[group_index(it->second)];
    ++stats.tweets;
    const Stance s = classify_stance(model, featurize(t.text, model.dim));
    ++stats.stance_counts[stance_index(s)];
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "no profile for author(s):";
    for (const auto& id : missing) msg += " " + id;
    throw Error(Errc::data, msg);
  }
  report.total_users = static_cast<std::int64_t>(profiles.size());
  report.total_tweets = static_cast<std::int64_t>(tweets.size());
  for (auto& stats : report.groups) {
    stats.user_share = report.total_users > 0
                           ? static_cast<double>(stats.users) / static_cast<double>(report.total_users)
                           : 0.0;
    stats.tweet_share = report.total_tweets > 0 ? static_cast<double>(stats.tweets) /
                                                      static_cast<double>(report.total_tweets)
                                                : 0.0;
  }
  return report;
}

}  // namespace fxp
