#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "eventstudy.hpp"
#include "ingest.hpp"
#include "manipulation.hpp"
#include "timeutil.hpp"
#include "usergroups.hpp"
#include "util.hpp"

namespace fxp {
namespace {

[[noreturn]] void infeasible(const std::string& why) {
  throw Error(Errc::invalid_argument, "synthetic spec infeasible: " + why);
}

// Portable normal deviate: Box-Muller over mt19937_64 words, so corpora are
// bit-identical across standard libraries (std::normal_distribution is not).
double gauss(std::mt19937_64& rng) {
  constexpr double kInv = 1.0 / 9007199254740992.0;  // 2^-53
  double u1 = (static_cast<double>(rng() >> 11) + 0.5) * kInv;
  double u2 = (static_cast<double>(rng() >> 11) + 0.5) * kInv;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::string make_id(std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%07zu", n);
  return buf;
}

const char* const kBuyTemplates[5] = {
    "going long eurusd this morning target ",   "buy euro now strong breakout above ",
    "eurusd looking bullish adding to longs ",  "buying the dip on $eurusd target ",
    "euro upside momentum confirmed going long ",
};
const char* const kHoldTemplates[5] = {
    "eurusd ranging sideways waiting for direction ", "no position on euro today just watching ",
    "quiet session for $eurusd staying flat ",        "waiting for the minutes before any euro trade ",
    "eurusd stuck between levels nothing to do ",
};
const char* const kSellTemplates[5] = {
    "going short eurusd breakdown below ",     "sell euro now weak data out of europe ",
    "eurusd looking bearish adding to shorts ", "selling rallies on $eurusd target ",
    "euro downside accelerating going short ",
};

const char* stance_template(Stance s, std::size_t n) {
  switch (s) {
    case Stance::Buy: return kBuyTemplates[n % 5];
    case Stance::Hold: return kHoldTemplates[n % 5];
    case Stance::Sell: return kSellTemplates[n % 5];
  }
  return kHoldTemplates[0];
}

struct Builder {
  const SyntheticSpec& spec;
  std::mt19937_64 rng;
  Timestamp t0 = 0;

  std::vector<TweetRecord> tweets;
  std::size_t next_id = 1;
  std::size_t template_counter = 0;

  std::vector<std::string> companies, individuals, robots, spammers, casuals;
  std::vector<std::string> pool_authors;  // companies then individuals
  std::map<std::string, UserGroup> intended;
  std::vector<std::string> pool_ids;  // labeled tweets, creation order

  std::vector<std::int64_t> event_minutes;  // regular then flip, ascending
  std::int64_t pool_start_m = 1440, pool_end_m = 0, rate_end_m = 0;
  std::int64_t qz_m = 0;  // next free minute in the quiet zone
  Timestamp audit_time = 0;

  // planted truth
  std::vector<RepostCluster> planted_clusters;
  std::vector<std::pair<std::string, std::string>> planted_typos;
  std::vector<std::string> planted_retweets, planted_recs, planted_other, planted_flips;
  std::set<std::string> planted_dead;

  explicit Builder(const SyntheticSpec& s) : spec(s), rng(s.seed) {
    t0 = *parse_utc("2014-01-06T00:00:00Z");  // a Monday
  }

  Timestamp at_min(std::int64_t m) const { return t0 + m * 60; }

  void layout() {
    int total_events = spec.events + spec.car_flip_events;
    std::int64_t first = spec.window_min + 120;
    for (int i = 0; i < total_events; ++i)
      event_minutes.push_back(first + static_cast<std::int64_t>(i) * spec.event_spacing_min);
    rate_end_m = event_minutes.empty() ? spec.window_min + 240
                                       : event_minutes.back() + spec.horizon_min + 120;
    pool_end_m = std::max(rate_end_m, pool_start_m + 45 * 1440);
    qz_m = pool_end_m + 120;
  }

  bool in_event_window(std::int64_t minute) const {
    auto it = std::upper_bound(event_minutes.begin(), event_minutes.end(), minute);
    return it != event_minutes.begin() && minute - *(it - 1) < 60;
  }

  void make_users() {
    auto fill = [&](std::vector<std::string>& v, int n, const char* fmt, UserGroup g) {
      for (int i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, fmt, i);
        v.emplace_back(buf);
        intended[buf] = g;
      }
    };
    fill(robots, spec.robots, "robot%02d", UserGroup::TradingRobot);
    fill(spammers, spec.spammers, "spam%02d", UserGroup::Spammer);
    fill(companies, spec.companies, "fxhouse%02d", UserGroup::TradingCompany);
    fill(individuals, spec.individuals, "trader%02d", UserGroup::IndividualTrader);
    fill(casuals, spec.others, "casual%02d", UserGroup::Other);
    pool_authors = companies;
    pool_authors.insert(pool_authors.end(), individuals.begin(), individuals.end());
  }

  TweetRecord& add(const std::string& author, std::int64_t minute, int sec, std::string text) {
    TweetRecord t;
    t.id = make_id(next_id++);
    t.author_id = author;
    t.timestamp = at_min(minute) + sec;
    t.text = std::move(text);
    tweets.push_back(std::move(t));
    return tweets.back();
  }

  // retweet_count policy per author kind, on a fixed per-author cadence so
  // companies clear their ratio threshold and individuals sit between the two
  // bars at any corpus size.
  std::map<std::string, std::int64_t> author_seq;
  std::int64_t draw_retweet_count(const std::string& author) {
    auto g = intended.find(author);
    if (g == intended.end()) return 0;
    std::int64_t n = author_seq[author]++;
    if (g->second == UserGroup::TradingCompany) return n % 5 < 2 ? 1 + n % 7 : 0;
    if (g->second == UserGroup::IndividualTrader) return n % 10 == 0 ? 1 + n % 3 : 0;
    return 0;
  }

  std::string numbered(const char* stem, std::size_t n) { return std::string(stem) + std::to_string(n); }

  std::string pool_text(Stance s) {
    std::size_t n = template_counter++;
    return std::string(stance_template(s, n)) + std::to_string(10000 + n);
  }

  void make_labeled_pool() {
    std::int64_t span = pool_end_m - pool_start_m;
    std::size_t count = static_cast<std::size_t>(spec.labeled_per_class) * 3;
    for (std::size_t j = 0; j < count; ++j) {
      Stance cls = j % 3 == 0 ? Stance::Buy : (j % 3 == 1 ? Stance::Hold : Stance::Sell);
      std::int64_t minute = 0;
      int guard = 0;
      do {
        minute = pool_start_m + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(span + 1));
        if (++guard > 10000) infeasible("could not place labeled tweets outside event windows");
      } while (in_event_window(minute));
      int sec = static_cast<int>(rng() % 60);
      std::string text = pool_text(cls);
      if (j % 7 == 1) text += " https://chart.example/c" + std::to_string(j);
      if (j % 11 == 3) text = "@fxdesk" + std::to_string(j % 7) + " " + text;
      const std::string& author = pool_authors[j % pool_authors.size()];
      TweetRecord& t = add(author, minute, sec, std::move(text));
      t.gold_label = cls;
      t.retweet_count = draw_retweet_count(author);
      pool_ids.push_back(t.id);
    }
  }

  void make_robots() {
    static const char* const kPatterns[8] = {"Closed Buy", "Closed Sell", "Buy stop", "Sell stop",
                                             "Buy limit",  "Sell limit",  "Opened Buy", "Opened Sell"};
    std::int64_t span = pool_end_m - pool_start_m;
    std::size_t n = 0;
    for (std::size_t r = 0; r < robots.size(); ++r) {
      for (int k = 0; k < spec.robot_tweets; ++k, ++n) {
        std::int64_t minute = pool_start_m + span * k / std::max(1, spec.robot_tweets) + static_cast<std::int64_t>(r);
        char price[16];
        std::snprintf(price, sizeof price, "%.4f", 1.05 + 0.0001 * (k % 400));
        std::string text = std::string(kPatterns[n % 8]) + " eurusd " + price + " lots 0.10 ref " +
                           std::to_string(20000 + n);
        add(robots[r], minute, static_cast<int>(rng() % 60), std::move(text));
      }
    }
  }

  void make_spammers() {
    std::int64_t span = pool_end_m - pool_start_m;
    std::size_t n = 0;
    for (std::size_t s = 0; s < spammers.size(); ++s) {
      for (int k = 0; k < spec.spammer_tweets; ++k, ++n) {
        std::int64_t minute = pool_start_m + span * k / std::max(1, spec.spammer_tweets) + static_cast<std::int64_t>(s);
        add(spammers[s], minute, static_cast<int>(rng() % 60),
            numbered("free forex signals winning pips guaranteed join room ", 30000 + n));
      }
    }
  }

  void make_casuals() {
    static const char* const kTexts[3] = {"coffee first then the charts note ",
                                          "great weekend everyone see you monday note ",
                                          "conference wifi is terrible again note "};
    std::size_t n = 0;
    for (std::size_t o = 0; o < casuals.size(); ++o) {
      for (int k = 0; k < spec.other_tweets; ++k, ++n) {
        std::int64_t minute = pool_start_m + static_cast<std::int64_t>(o) * 37 + static_cast<std::int64_t>(k) * 977;
        TweetRecord& t = add(casuals[o], minute, static_cast<int>(rng() % 60),
                             numbered(kTexts[k % 3], 40000 + n));
        if (k == 0) t.retweet_count = 1;  // nonzero ratio, still Other via short span
      }
    }
  }

  Stance event_class(int i) const {
    if (i >= spec.events) return Stance::Buy;  // flip events carry a Buy tweet
    return i % 3 == 0 ? Stance::Buy : (i % 3 == 1 ? Stance::Hold : Stance::Sell);
  }

  void make_event_windows() {
    for (int i = 0; i < spec.events; ++i) {
      Stance cls = event_class(i);
      for (int j = 0; j < spec.event_window_tweets; ++j) {
        std::int64_t minute = event_minutes[static_cast<std::size_t>(i)] + 1 + (j * 7) % 58;
        const std::string& author =
            pool_authors[(static_cast<std::size_t>(i) * spec.event_window_tweets + j) % pool_authors.size()];
        TweetRecord& t = add(author, minute, static_cast<int>(rng() % 60), pool_text(cls));
        t.retweet_count = draw_retweet_count(author);
      }
    }
    for (int f = 0; f < spec.car_flip_events; ++f) {
      std::int64_t minute = event_minutes[static_cast<std::size_t>(spec.events + f)] + 5;
      // worded from the buy-template vocabulary so any reasonably trained
      // classifier reads it as a buy recommendation, yet far from every pool
      // tweet in edit distance so the typo rule cannot claim it
      TweetRecord& t = add(individuals[static_cast<std::size_t>(f) % individuals.size()], minute,
                           static_cast<int>(rng() % 60),
                           numbered("buy now going long eurusd strong bullish breakout target ",
                                    50000 + static_cast<std::size_t>(f)));
      planted_flips.push_back(t.id);
      planted_dead.insert(t.id);
    }
  }

  std::int64_t take_slot() {
    std::int64_t m = qz_m;
    qz_m += 10;
    return m;
  }

  // Suffix variants keep consecutive deletions by the same author far apart in
  // edit distance, so nothing stray trips the near-duplicate rule.
  static const char* variant(std::size_t round, const char* const (&opts)[3]) { return opts[round % 3]; }

  void make_deletions() {
    for (int c = 0; c < spec.repost_clusters; ++c) {
      const std::string& author = individuals[static_cast<std::size_t>(c) % individuals.size()];
      std::string text = numbered("promo our premium analysis bundle code ", 7000 + static_cast<std::size_t>(c)) +
                         " join today";
      RepostCluster cluster{author, text, {}};
      for (int k = 0; k < spec.repost_size; ++k) {
        TweetRecord& t = add(author, take_slot(), static_cast<int>(rng() % 60), text);
        cluster.ids.push_back(t.id);
        planted_dead.insert(t.id);
      }
      planted_clusters.push_back(std::move(cluster));
    }

    for (int j = 0; j < spec.typos; ++j) {
      const std::string& author = individuals[static_cast<std::size_t>(j + 1) % individuals.size()];
      std::string tail = std::to_string(8000 + j) + " watch closely";
      std::string bad = "eurusd breaking resistnce levl " + tail;
      std::string good = "eurusd breaking resistance level " + tail;
      std::int64_t m = take_slot();
      std::string del_id = add(author, m, static_cast<int>(rng() % 60), bad).id;
      std::string repl_id = add(author, m + 5, static_cast<int>(rng() % 60), good).id;
      if (std::int64_t d = edit_distance(bad, good); d <= 1 || d >= 4)
        infeasible("typo pair not at a correctable distance");
      planted_typos.emplace_back(del_id, repl_id);
      planted_dead.insert(del_id);
    }

    static const char* const kRtSuffix[3] = {"", " with the desk summary attached", " plus levels for the week"};
    for (int j = 0; j < spec.deleted_retweets; ++j) {
      const std::string& author = individuals[static_cast<std::size_t>(j + 2) % individuals.size()];
      TweetRecord& t = add(author, take_slot(), static_cast<int>(rng() % 60),
                           "RT @" + pool_authors[static_cast<std::size_t>(j) % pool_authors.size()] +
                               ": daily eurusd outlook brief " + std::to_string(9000 + j) +
                               variant(static_cast<std::size_t>(j) / individuals.size(), kRtSuffix));
      t.is_retweet = true;
      t.retweet_of = pool_ids[static_cast<std::size_t>(j) % pool_ids.size()];
      planted_retweets.push_back(t.id);
      planted_dead.insert(t.id);
    }

    static const char* const kRecSuffix[3] = {"", " intraday view", " for the swing book this week"};
    for (int j = 0; j < spec.deleted_recommendations; ++j) {
      const std::string& author = companies[static_cast<std::size_t>(j) % companies.size()];
      TweetRecord& t = add(author, take_slot(), static_cast<int>(rng() % 60),
                           "we stay bullish on $eurusd into the close target " + std::to_string(9500 + j) +
                               variant(static_cast<std::size_t>(j) / companies.size(), kRecSuffix));
      planted_recs.push_back(t.id);
      planted_dead.insert(t.id);
    }

    static const char* const kOtherSuffix[3] = {"", " before the london open", " while the desk warms up"};
    for (int j = 0; j < spec.deleted_other; ++j) {
      const std::string& author = individuals[static_cast<std::size_t>(j + 3) % individuals.size()];
      TweetRecord& t = add(author, take_slot(), static_cast<int>(rng() % 60),
                           "morning espresso and market screens note " + std::to_string(9900 + j) +
                               variant(static_cast<std::size_t>(j) / individuals.size(), kOtherSuffix));
      planted_other.push_back(t.id);
      planted_dead.insert(t.id);
    }

    audit_time = at_min(qz_m + 1440);
  }

  std::vector<double> make_rates() const {
    std::size_t n = static_cast<std::size_t>(rate_end_m) + 1;
    std::vector<double> price(n);
    std::mt19937_64 noise_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    double sigma = spec.noise_sigma * spec.base_price;
    for (std::size_t i = 0; i < n; ++i)
      price[i] = spec.base_price + spec.base_slope_per_min * static_cast<double>(i) +
                 (sigma > 0 ? sigma * gauss(noise_rng) : 0.0);
    // Each drift compounds on the actual noise-free level at its event, which
    // includes every earlier event's settled shift; otherwise later events'
    // relative returns would be off by that accumulated offset.
    double level_shift = 0.0;
    for (std::size_t e = 0; e < event_minutes.size(); ++e) {
      Stance cls = event_class(static_cast<int>(e));
      double target = cls == Stance::Buy ? spec.car_buy : (cls == Stance::Sell ? spec.car_sell : spec.car_hold);
      double r = target / spec.horizon_min;
      std::size_t m = static_cast<std::size_t>(event_minutes[e]);
      double p0 = spec.base_price + spec.base_slope_per_min * static_cast<double>(m) + level_shift;
      double factor = 1.0;
      std::size_t i = 1;
      for (; i <= static_cast<std::size_t>(spec.horizon_min) && m + i < n; ++i) {
        factor *= 1.0 + r;
        price[m + i] += p0 * (factor - 1.0);
      }
      for (std::size_t k = m + i; k < n; ++k) price[k] += p0 * (factor - 1.0);
      level_shift += p0 * (factor - 1.0);
    }
    for (double p : price)
      if (p <= 0) infeasible("rate series not positive; lower noise_sigma or targets");
    return price;
  }

  void self_check() const {
    std::vector<TweetRecord> copy = tweets;
    std::vector<DeletionAuditEntry> entries;
    for (const auto& id : planted_dead) entries.push_back({id, false, audit_time});
    AuditResult res = apply_deletion_audit(copy, entries, false);
    if (!res.unmatched_ids.empty() || res.matched_dead != planted_dead.size())
      infeasible("audit entries did not resolve against the corpus");

    GroupRuleConfig rules = GroupRuleConfig::defaults();
    auto profiles = build_profiles(copy, rules);
    for (const auto& [author, group] : intended) {
      auto it = profiles.find(author);
      if (it == profiles.end()) continue;  // user ended up with no tweets
      UserGroup got = classify_user(it->second, rules);
      if (got != group)
        infeasible("user " + author + " classifies as " + to_string(got) + ", intended " + to_string(group));
    }

    DeletionBreakdown b = categorize_deletions(copy, TypoRuleConfig{}, RecommendationLexicon::defaults());
    auto ids_of = [](const std::vector<RepostCluster>& cs) {
      std::set<std::string> s;
      for (const auto& c : cs) s.insert(c.ids.begin(), c.ids.end());
      return s;
    };
    if (ids_of(b.repost_clusters) != ids_of(planted_clusters) ||
        b.repost_clusters.size() != planted_clusters.size())
      infeasible("repost clusters not recovered as planted");
    std::set<std::pair<std::string, std::string>> want_typos(planted_typos.begin(), planted_typos.end());
    std::set<std::pair<std::string, std::string>> got_typos(b.typo_deletions.begin(), b.typo_deletions.end());
    if (want_typos != got_typos) infeasible("typo deletions not recovered as planted");
    auto as_set = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()); };
    if (as_set(b.deleted_retweet_ids) != as_set(planted_retweets))
      infeasible("deleted retweets not recovered as planted");
    std::set<std::string> want_recs = as_set(planted_recs);
    want_recs.insert(planted_flips.begin(), planted_flips.end());
    if (as_set(b.recommendation_ids) != want_recs)
      infeasible("recommendation deletions not recovered as planted");
    if (as_set(b.unexplained_ids) != as_set(planted_other))
      infeasible("unexplained deletions not recovered as planted");
  }

  void write_all(const std::string& out_dir, const std::vector<double>& price) {
    namespace fs = std::filesystem;
    std::stable_sort(tweets.begin(), tweets.end(), [](const TweetRecord& a, const TweetRecord& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
    });

    std::ostringstream tw;
    for (const auto& t : tweets) tw << serialize_tweet(t) << "\n";
    write_file_atomic((fs::path(out_dir) / "tweets.jsonl").string(), tw.str());

    std::ostringstream rc;
    rc << "timestamp,price\n";
    for (std::size_t i = 0; i < price.size(); ++i)
      rc << format_utc(at_min(static_cast<std::int64_t>(i))) << "," << format_double(price[i]) << "\n";
    write_file_atomic((fs::path(out_dir) / "rates.csv").string(), rc.str());

    static const char* const kDesc[4] = {"rate decision", "press conference", "policy statement",
                                         "minutes release"};
    std::ostringstream ev;
    ev << "timestamp,source,description\n";
    for (std::size_t i = 0; i < event_minutes.size(); ++i) {
      EventSource src = i % 3 == 0 ? EventSource::ECB : (i % 3 == 1 ? EventSource::FED : EventSource::GOV);
      std::string desc = std::string(kDesc[i % 4]) + " " + std::to_string(i + 1);
      if (i % 5 == 4) desc += ", extended remarks";
      ev << format_utc(at_min(event_minutes[i])) << "," << to_string(src) << "," << csv_field(desc) << "\n";
    }
    write_file_atomic((fs::path(out_dir) / "events.csv").string(), ev.str());

    std::ostringstream au;
    for (const auto& id : planted_dead) {
      nlohmann::json j{{"id", id}, {"alive", false}, {"checked_at", format_utc(audit_time)}};
      au << j.dump() << "\n";
    }
    std::set<std::string> alive;
    for (const auto& [del, repl] : planted_typos) alive.insert(repl);
    for (std::size_t i = 0; i < pool_ids.size() && i < 20; ++i) alive.insert(pool_ids[i]);
    for (const auto& id : alive) {
      nlohmann::json j{{"id", id}, {"alive", true}, {"checked_at", format_utc(audit_time)}};
      au << j.dump() << "\n";
    }
    write_file_atomic((fs::path(out_dir) / "audit.jsonl").string(), au.str());

    write_file_atomic((fs::path(out_dir) / "ground_truth.json").string(), ground_truth(price));
  }

  std::string ground_truth(const std::vector<double>& price) const {
    nlohmann::json users = nlohmann::json::array();
    std::set<std::string> present;
    for (const auto& t : tweets) present.insert(t.author_id);
    for (const auto& [author, group] : intended)
      if (present.count(author)) users.push_back({{"id", author}, {"group", to_string(group)}});

    nlohmann::json events = nlohmann::json::array();
    for (std::size_t i = 0; i < event_minutes.size(); ++i) {
      Stance cls = event_class(static_cast<int>(i));
      double target = cls == Stance::Buy ? spec.car_buy : (cls == Stance::Sell ? spec.car_sell : spec.car_hold);
      char idbuf[16];
      std::snprintf(idbuf, sizeof idbuf, "ev%06zu", i + 1);
      events.push_back({{"id", idbuf},
                        {"timestamp", format_utc(at_min(event_minutes[i]))},
                        {"class", to_string(cls)},
                        {"car_final", target},
                        {"flip", static_cast<int>(i) >= spec.events}});
    }

    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : planted_clusters)
      clusters.push_back({{"author", c.author_id}, {"text", c.text}, {"ids", c.ids}});
    nlohmann::json typos = nlohmann::json::array();
    for (const auto& [del, repl] : planted_typos) typos.push_back({{"deleted", del}, {"replacement", repl}});

    std::int64_t labeled = 0;
    for (const auto& t : tweets) labeled += t.gold_label.has_value();

    nlohmann::json j{
        {"seed", spec.seed},
        {"per_step_return",
         {{"buy", spec.car_buy / spec.horizon_min},
          {"hold", spec.car_hold / spec.horizon_min},
          {"sell", spec.car_sell / spec.horizon_min}}},
        {"final_lag_car", {{"buy", spec.car_buy}, {"hold", spec.car_hold}, {"sell", spec.car_sell}}},
        {"horizon_min", spec.horizon_min},
        {"window_min", spec.window_min},
        {"noise_sigma", spec.noise_sigma},
        {"base_price", spec.base_price},
        {"base_slope_per_min", spec.base_slope_per_min},
        {"users", users},
        {"events", events},
        {"deletions",
         {{"repost_clusters", clusters},
          {"typos", typos},
          {"retweets", planted_retweets},
          {"recommendations", planted_recs},
          {"unexplained", planted_other},
          {"car_flip", planted_flips}}},
        {"counts",
         {{"tweets", tweets.size()},
          {"labeled", labeled},
          {"deleted", planted_dead.size()},
          {"rates", price.size()},
          {"events", event_minutes.size()}}},
    };
    return j.dump(2) + "\n";
  }
};

}  // namespace

SyntheticSpec SyntheticSpec::from_file(const std::string& path) {
  SyntheticSpec s;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, "synthetic spec " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse, "synthetic spec " + path + ": expected a JSON object");
  auto geti = [&](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw Error(Errc::parse, "synthetic spec: \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
  };
  auto getd = [&](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw Error(Errc::parse, "synthetic spec: \"" + key + "\" must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") { s.seed = static_cast<std::uint64_t>(geti(v, key)); s.seed_from_file = true; }
    else if (key == "robots") s.robots = static_cast<int>(geti(v, key));
    else if (key == "spammers") s.spammers = static_cast<int>(geti(v, key));
    else if (key == "companies") s.companies = static_cast<int>(geti(v, key));
    else if (key == "individuals") s.individuals = static_cast<int>(geti(v, key));
    else if (key == "others") s.others = static_cast<int>(geti(v, key));
    else if (key == "robot_tweets") s.robot_tweets = static_cast<int>(geti(v, key));
    else if (key == "spammer_tweets") s.spammer_tweets = static_cast<int>(geti(v, key));
    else if (key == "other_tweets") s.other_tweets = static_cast<int>(geti(v, key));
    else if (key == "labeled_per_class") s.labeled_per_class = static_cast<int>(geti(v, key));
    else if (key == "events") s.events = static_cast<int>(geti(v, key));
    else if (key == "event_window_tweets") s.event_window_tweets = static_cast<int>(geti(v, key));
    else if (key == "car_buy") s.car_buy = getd(v, key);
    else if (key == "car_hold") s.car_hold = getd(v, key);
    else if (key == "car_sell") s.car_sell = getd(v, key);
    else if (key == "noise_sigma") s.noise_sigma = getd(v, key);
    else if (key == "horizon_min") s.horizon_min = static_cast<int>(geti(v, key));
    else if (key == "window_min") s.window_min = static_cast<int>(geti(v, key));
    else if (key == "event_spacing_min") s.event_spacing_min = static_cast<int>(geti(v, key));
    else if (key == "base_price") s.base_price = getd(v, key);
    else if (key == "base_slope_per_min") s.base_slope_per_min = getd(v, key);
    else if (key == "repost_clusters") s.repost_clusters = static_cast<int>(geti(v, key));
    else if (key == "repost_size") s.repost_size = static_cast<int>(geti(v, key));
    else if (key == "typos") s.typos = static_cast<int>(geti(v, key));
    else if (key == "deleted_retweets") s.deleted_retweets = static_cast<int>(geti(v, key));
    else if (key == "deleted_recommendations") s.deleted_recommendations = static_cast<int>(geti(v, key));
    else if (key == "deleted_other") s.deleted_other = static_cast<int>(geti(v, key));
    else if (key == "car_flip_events") s.car_flip_events = static_cast<int>(geti(v, key));
    else throw Error(Errc::invalid_argument, "synthetic spec: unknown key \"" + key + "\"");
  }
  s.validate();
  return s;
}

void SyntheticSpec::validate() const {
  auto nonneg = [](int v, const char* name) {
    if (v < 0) throw Error(Errc::invalid_argument, std::string("synthetic spec: ") + name + " must be >= 0");
  };
  nonneg(robots, "robots"); nonneg(spammers, "spammers"); nonneg(companies, "companies");
  nonneg(individuals, "individuals"); nonneg(others, "others");
  nonneg(robot_tweets, "robot_tweets"); nonneg(spammer_tweets, "spammer_tweets");
  nonneg(other_tweets, "other_tweets"); nonneg(labeled_per_class, "labeled_per_class");
  nonneg(events, "events"); nonneg(event_window_tweets, "event_window_tweets");
  nonneg(repost_clusters, "repost_clusters"); nonneg(typos, "typos");
  nonneg(deleted_retweets, "deleted_retweets"); nonneg(deleted_recommendations, "deleted_recommendations");
  nonneg(deleted_other, "deleted_other"); nonneg(car_flip_events, "car_flip_events");
  if (horizon_min < 1) throw Error(Errc::invalid_argument, "synthetic spec: horizon_min must be >= 1");
  if (window_min < 2) throw Error(Errc::invalid_argument, "synthetic spec: window_min must be >= 2");
  if (event_spacing_min < 1) throw Error(Errc::invalid_argument, "synthetic spec: event_spacing_min must be >= 1");
  if (base_price <= 0) throw Error(Errc::invalid_argument, "synthetic spec: base_price must be positive");
  if (noise_sigma < 0 || noise_sigma > 0.01)
    throw Error(Errc::invalid_argument, "synthetic spec: noise_sigma must be in [0, 0.01]");
  for (double c : {car_buy, car_hold, car_sell})
    if (std::abs(c) > 0.02)
      throw Error(Errc::invalid_argument, "synthetic spec: car targets must be within [-0.02, 0.02]");
  if (repost_clusters > 0 && repost_size < 2)
    throw Error(Errc::invalid_argument, "synthetic spec: repost_size must be >= 2");
  if (events + car_flip_events > 1 && event_spacing_min <= horizon_min + window_min)
    throw Error(Errc::invalid_argument,
                "synthetic spec: event_spacing_min must exceed horizon_min + window_min so pre-event "
                "windows see only settled prices");
  bool needs_individuals = repost_clusters > 0 || typos > 0 || deleted_retweets > 0 ||
                           deleted_other > 0 || car_flip_events > 0;
  if (needs_individuals && individuals < 1)
    throw Error(Errc::invalid_argument, "synthetic spec: deletion scenarios need at least one individual");
  if (deleted_recommendations > 0 && companies < 1)
    throw Error(Errc::invalid_argument, "synthetic spec: recommendation deletions need at least one company");
  if ((labeled_per_class > 0 || (events > 0 && event_window_tweets > 0)) && companies + individuals < 1)
    throw Error(Errc::invalid_argument, "synthetic spec: labeled tweets need company or individual authors");
  if (deleted_retweets > 0 && labeled_per_class < 1)
    throw Error(Errc::invalid_argument, "synthetic spec: deleted retweets need labeled tweets to point at");
}

void generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
  spec.validate();
  Builder b(spec);
  b.layout();
  b.make_users();
  b.make_labeled_pool();
  b.make_robots();
  b.make_spammers();
  b.make_casuals();
  b.make_event_windows();
  b.make_deletions();
  std::vector<double> price = b.make_rates();
  b.self_check();
  b.write_all(out_dir, price);
}

}  // namespace fxp
