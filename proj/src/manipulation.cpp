#include "manipulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "featurize.hpp"
#include "util.hpp"

namespace fxp {

namespace {

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      out.push_back(c);
      i += 1;
    } else if ((c >> 5) == 0x6 && cont(1)) {
      out.push_back(((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu));
      i += 2;
    } else if ((c >> 4) == 0xE && cont(1) && cont(2)) {
      out.push_back(((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                    (static_cast<unsigned char>(s[i + 2]) & 0x3Fu));
      i += 3;
    } else if ((c >> 3) == 0x1E && cont(1) && cont(2) && cont(3)) {
      out.push_back(((c & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                    ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                    (static_cast<unsigned char>(s[i + 3]) & 0x3Fu));
      i += 4;
    } else {
      out.push_back(c);  // lone byte of a broken sequence: one unit
      i += 1;
    }
  }
  return out;
}

}  // namespace

std::int64_t edit_distance(std::string_view a, std::string_view b) {
  const std::u32string ua = utf8_decode(a);
  const std::u32string ub = utf8_decode(b);
  const std::size_t n = ua.size(), m = ub.size();
  if (n == 0) return static_cast<std::int64_t>(m);
  if (m == 0) return static_cast<std::int64_t>(n);
  std::vector<std::int64_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::optional<std::string> detect_typo_deletion(const TweetRecord& deleted,
                                                std::span<const TweetRecord* const> following,
                                                const TypoRuleConfig& cfg) {
  const std::string base = cfg.url_normalize ? normalize_urls(deleted.text) : deleted.text;
  const std::size_t limit = std::min<std::size_t>(following.size(),
                                                  static_cast<std::size_t>(std::max(cfg.max_following, 0)));
  for (std::size_t i = 0; i < limit; ++i) {
    const TweetRecord* cand = following[i];
    if (cand->author_id != deleted.author_id)
      throw Error(Errc::invalid_argument, "typo scan: tweet " + cand->id + " belongs to author " +
                                              cand->author_id + ", expected " + deleted.author_id);
    const std::string other = cfg.url_normalize ? normalize_urls(cand->text) : cand->text;
    const std::int64_t d = edit_distance(base, other);
    if (d > cfg.min_exclusive && d < cfg.max_exclusive) return cand->id;
  }
  return std::nullopt;
}

std::vector<RepostCluster> find_repost_clusters(std::span<const TweetRecord* const> deleted) {
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
  for (const TweetRecord* t : deleted)
    groups[{t->author_id, std::string(trim_right(t->text))}].push_back(t->id);
  std::vector<RepostCluster> clusters;
  for (auto& [key, ids] : groups)
    if (ids.size() >= 2) clusters.push_back({key.first, key.second, std::move(ids)});
  std::sort(clusters.begin(), clusters.end(), [](const RepostCluster& a, const RepostCluster& b) {
    if (a.ids.size() != b.ids.size()) return a.ids.size() > b.ids.size();
    if (a.author_id != b.author_id) return a.author_id < b.author_id;
    return a.text < b.text;
  });
  return clusters;
}

RecommendationLexicon RecommendationLexicon::defaults() {
  return {{"long", "short", "bear", "bull", "bearish", "bullish", "resistance", "support", "buy",
           "sell", "close"}};
}

bool is_recommendation(std::string_view text, const RecommendationLexicon& lexicon) {
  std::string token;
  auto check = [&]() {
    if (token.empty()) return false;
    for (const auto& w : lexicon.words)
      if (token == w) return true;
    return false;
  };
  for (char ch : text) {
    char c = ch;
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    if (c >= 'a' && c <= 'z') {
      token.push_back(c);
    } else {
      if (check()) return true;
      token.clear();
    }
  }
  return check();
}

DeletionBreakdown categorize_deletions(const std::vector<TweetRecord>& tweets,
                                       const TypoRuleConfig& typo_cfg,
                                       const RecommendationLexicon& lexicon) {
  DeletionBreakdown out;
  std::vector<const TweetRecord*> deleted;
  for (const auto& t : tweets)
    if (t.deleted) deleted.push_back(&t);
  out.total_deleted = static_cast<std::int64_t>(deleted.size());
  {
    std::set<std::pair<std::string, std::string>> uniq;
    for (const TweetRecord* t : deleted) uniq.emplace(t->author_id, std::string(trim_right(t->text)));
    out.unique_deleted = static_cast<std::int64_t>(uniq.size());
  }
  out.repost_clusters = find_repost_clusters(deleted);
  std::unordered_set<std::string> repost_ids;
  for (const auto& c : out.repost_clusters)
    for (const auto& id : c.ids) repost_ids.insert(id);

  // Author timelines ordered by (time, id); "following" = later entries.
  std::map<std::string, std::vector<const TweetRecord*>> timeline;
  for (const auto& t : tweets) timeline[t.author_id].push_back(&t);
  std::unordered_map<const TweetRecord*, std::size_t> pos;
  for (auto& [author, list] : timeline) {
    std::stable_sort(list.begin(), list.end(), [](const TweetRecord* a, const TweetRecord* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->id < b->id;
    });
    for (std::size_t i = 0; i < list.size(); ++i) pos[list[i]] = i;
  }

  for (const TweetRecord* t : deleted) {
    if (repost_ids.count(t->id)) continue;  // repost outranks everything later
    const auto& list = timeline[t->author_id];
    const std::size_t at = pos[t];
    std::span<const TweetRecord* const> following(list.data() + at + 1, list.size() - at - 1);
    if (auto repl = detect_typo_deletion(*t, following, typo_cfg)) {
      out.typo_deletions.emplace_back(t->id, *repl);
      continue;
    }
    if (t->is_retweet) {
      out.deleted_retweet_ids.push_back(t->id);
      continue;
    }
    if (is_recommendation(t->text, lexicon)) {
      out.recommendation_ids.push_back(t->id);
      continue;
    }
    out.unexplained_ids.push_back(t->id);
  }
  return out;
}

const std::array<const char*, kDeletionBins> kDeletionBinLabels = {
    "0",     "0-10",  "10-20", "20-30", "30-40",  "40-50",
    "50-60", "60-70", "70-80", "80-90", "90-100", "100"};

std::size_t deletion_bin(std::int64_t deleted, std::int64_t total) {
  if (total <= 0 || deleted <= 0) return 0;
  if (deleted >= total) return kDeletionBins - 1;
  // Right-closed 10% steps: (0,10] is bin 1 ... (90,100) is bin 10.
  const double f = static_cast<double>(deleted) / static_cast<double>(total);
  std::size_t bin = static_cast<std::size_t>(std::ceil(f * 10.0));
  if (bin < 1) bin = 1;
  if (bin > 10) bin = 10;
  return bin;
}

ForensicsReport forensics_report(const std::vector<TweetRecord>& tweets,
                                 std::span<const Stance> stances,
                                 const std::map<std::string, UserGroup>& group_of,
                                 const TypoRuleConfig& typo_cfg,
                                 const RecommendationLexicon& lexicon) {
  if (stances.size() != tweets.size())
    throw Error(Errc::invalid_argument, "stance list does not parallel the tweet list");
  ForensicsReport report;
  report.breakdown = categorize_deletions(tweets, typo_cfg, lexicon);

  struct PerUser {
    std::int64_t total = 0;
    std::int64_t deleted = 0;
  };
  std::map<std::string, PerUser> per_user;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    auto git = group_of.find(t.author_id);
    if (git == group_of.end())
      throw Error(Errc::data, "no group for author " + t.author_id);
    auto& u = per_user[t.author_id];
    ++u.total;
    if (t.deleted) ++u.deleted;
    auto& cell = report.stance_table[group_index(git->second)][stance_index(stances[i])];
    ++cell.total;
    if (t.deleted) ++cell.deleted;
  }
  for (const auto& [author, u] : per_user) {
    const UserGroup g = group_of.at(author);
    ++report.histogram[group_index(g)][deletion_bin(u.deleted, u.total)];
  }
  return report;
}

CarComparison car_removal_comparison(const std::vector<AnnouncementEvent>& events,
                                     const RateSeries& rates,
                                     std::span<const ClassifiedTweet> tweets_by_time,
                                     const GroupFilter& filter, const StudyConfig& cfg) {
  CarComparison cmp;
  cmp.all = run_event_study(events, rates, tweets_by_time, filter, cfg, /*exclude_deleted=*/false);
  cmp.excluded =
      run_event_study(events, rates, tweets_by_time, filter, cfg, /*exclude_deleted=*/true);
  return cmp;
}

}  // namespace fxp
