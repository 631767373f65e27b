#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ingest.hpp"
#include "json.hpp"
#include "synth.hpp"
#include "timeutil.hpp"
#include "util.hpp"

namespace fxp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const std::string_view sv = trim(value);
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (res.ec != std::errc() || res.ptr != sv.data() + sv.size())
    throw Error(Errc::invalid_argument, "config: bad integer for \"" + key + "\": " + value);
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  const std::string_view sv = trim(value);
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (res.ec != std::errc() || res.ptr != sv.data() + sv.size())
    throw Error(Errc::invalid_argument, "config: bad number for \"" + key + "\": " + value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string_view sv = trim(value);
  if (sv == "true" || sv == "1" || sv == "yes" || sv == "on") return true;
  if (sv == "false" || sv == "0" || sv == "no" || sv == "off") return false;
  throw Error(Errc::invalid_argument, "config: bad boolean for \"" + key + "\": " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t bar = value.find('|', pos);
    const std::string_view tok = trim(
        std::string_view(value).substr(pos, bar == std::string::npos ? value.size() - pos : bar - pos));
    if (!tok.empty()) out.emplace_back(tok);
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return out;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const std::string v(trim(value));
  if (key == "tweets") tweets_path = v;
  else if (key == "rates") rates_path = v;
  else if (key == "events") events_path = v;
  else if (key == "audit") audit_path = v;
  else if (key == "model") model_path = v;
  else if (key == "out") out_dir = v;
  else if (key == "pair") pair = v;
  else if (key == "dim") {
    const std::int64_t d = parse_int(key, v);
    if (d < 1 || d > (1ll << 30)) throw Error(Errc::invalid_argument, "config: dim out of range");
    dim = static_cast<std::uint32_t>(d);
  } else if (key == "lambda") lambda = parse_real(key, v);
  else if (key == "epochs") epochs = static_cast<int>(parse_int(key, v));
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "folds") folds = static_cast<int>(parse_int(key, v));
  else if (key == "window_days") window_days = static_cast<int>(parse_int(key, v));
  else if (key == "horizon") horizon = static_cast<int>(parse_int(key, v));
  else if (key == "theta") theta = parse_real(key, v);
  else if (key == "groups") {
    group_filter_from_csv(v);  // validate now, fail early
    groups = v;
  } else if (key == "audit_latest_wins") audit_latest_wins = parse_bool(key, v);
  else if (key == "synth_spec") synth_spec_path = v;
  else if (key == "bot_rate") rules.bot_rate = parse_real(key, v);
  else if (key == "spam_tweets") rules.spam_tweets = parse_int(key, v);
  else if (key == "spam_retweeted_ratio") rules.spam_retweeted_ratio = parse_real(key, v);
  else if (key == "company_days") rules.company_days = parse_int(key, v);
  else if (key == "company_t_rate") rules.company_t_rate = parse_real(key, v);
  else if (key == "company_retweeted_ratio") rules.company_retweeted_ratio = parse_real(key, v);
  else if (key == "individual_days") rules.individual_days = parse_int(key, v);
  else if (key == "individual_retweeted_ratio") rules.individual_retweeted_ratio = parse_real(key, v);
  else if (key == "typo_max_following") typo.max_following = static_cast<int>(parse_int(key, v));
  else if (key == "typo_min_exclusive") typo.min_exclusive = parse_int(key, v);
  else if (key == "typo_max_exclusive") typo.max_exclusive = parse_int(key, v);
  else if (key == "typo_url_normalize") typo.url_normalize = parse_bool(key, v);
  else if (key == "patterns") rules.bot_patterns = split_list(value);
  else if (key == "lexicon") lexicon.words = split_list(value);
  else throw Error(Errc::invalid_argument, "config: unknown key \"" + key + "\"");
}

void PipelineConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  enum class Section { main, patterns, lexicon } section = Section::main;
  std::vector<std::string> patterns, lex;
  bool saw_patterns = false, saw_lexicon = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "[patterns]") {
      section = Section::patterns;
      saw_patterns = true;
      continue;
    }
    if (t == "[lexicon]") {
      section = Section::lexicon;
      saw_lexicon = true;
      continue;
    }
    if (t.front() == '[')
      throw Error(Errc::invalid_argument,
                  "config: unknown section " + std::string(t) + " at line " + std::to_string(lineno));
    if (section == Section::patterns) {
      patterns.emplace_back(t);
      continue;
    }
    if (section == Section::lexicon) {
      lex.emplace_back(t);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::invalid_argument,
                  "config: expected key = value at line " + std::to_string(lineno));
    const std::string key(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    if (key == "patterns" || key == "lexicon")
      throw Error(Errc::invalid_argument, "config: \"" + key + "\" belongs in its own section");
    try {
      set(key, value);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
    }
  }
  if (saw_patterns) rules.bot_patterns = std::move(patterns);
  if (saw_lexicon) lexicon.words = std::move(lex);
}

std::string PipelineConfig::render() const {
  std::ostringstream out;
  out << "tweets = " << tweets_path << "\n";
  out << "rates = " << rates_path << "\n";
  out << "events = " << events_path << "\n";
  out << "audit = " << audit_path << "\n";
  out << "model = " << model_path << "\n";
  out << "out = " << out_dir << "\n";
  out << "pair = " << pair << "\n";
  out << "dim = " << dim << "\n";
  out << "lambda = " << format_double(lambda) << "\n";
  out << "epochs = " << epochs << "\n";
  out << "seed = " << seed << "\n";
  out << "folds = " << folds << "\n";
  out << "window_days = " << window_days << "\n";
  out << "horizon = " << horizon << "\n";
  out << "theta = " << format_double(theta) << "\n";
  out << "groups = " << groups << "\n";
  out << "audit_latest_wins = " << (audit_latest_wins ? "true" : "false") << "\n";
  out << "synth_spec = " << synth_spec_path << "\n";
  out << "bot_rate = " << format_double(rules.bot_rate) << "\n";
  out << "spam_tweets = " << rules.spam_tweets << "\n";
  out << "spam_retweeted_ratio = " << format_double(rules.spam_retweeted_ratio) << "\n";
  out << "company_days = " << rules.company_days << "\n";
  out << "company_t_rate = " << format_double(rules.company_t_rate) << "\n";
  out << "company_retweeted_ratio = " << format_double(rules.company_retweeted_ratio) << "\n";
  out << "individual_days = " << rules.individual_days << "\n";
  out << "individual_retweeted_ratio = " << format_double(rules.individual_retweeted_ratio) << "\n";
  out << "typo_max_following = " << typo.max_following << "\n";
  out << "typo_min_exclusive = " << typo.min_exclusive << "\n";
  out << "typo_max_exclusive = " << typo.max_exclusive << "\n";
  out << "typo_url_normalize = " << (typo.url_normalize ? "true" : "false") << "\n";
  out << "[patterns]\n";
  for (const auto& p : rules.bot_patterns) out << p << "\n";
  out << "[lexicon]\n";
  for (const auto& w : lexicon.words) out << w << "\n";
  return out.str();
}

std::string PipelineConfig::effective_model_path() const {
  if (!model_path.empty()) return model_path;
  return (fs::path(out_dir) / "model.txt").string();
}

const char* const kSubcommands[9] = {"ingest",      "train",     "eval",   "classify", "groups",
                                     "event-study", "deletions", "report", "synth"};

bool is_subcommand(const std::string& name) {
  for (const char* s : kSubcommands)
    if (name == s) return true;
  return false;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::io:
      return 1;
    default:
      return 2;
  }
}

namespace {

// ---- input loading -------------------------------------------------------

struct Dataset {
  std::vector<TweetRecord> tweets;
  std::vector<ParseError> tweet_errors;
  RateSeries rates;
  std::vector<AnnouncementEvent> events;
  std::vector<DeletionAuditEntry> audit;
  AuditResult audit_result;
  bool has_tweets = false, has_rates = false, has_events = false, has_audit = false;
};

enum Needs : unsigned {
  kNeedTweets = 1,
  kNeedRates = 2,
  kNeedEvents = 4,
  kNeedAudit = 8,
};

std::ifstream open_input(const std::string& path, const char* flag) {
  if (path.empty())
    throw Error(Errc::invalid_argument, std::string("missing required input: --") + flag);
  if (!fs::exists(path))
    throw Error(Errc::io, std::string("input file not found: ") + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, std::string("cannot open input: ") + path);
  return in;
}

Dataset load_inputs(const PipelineConfig& cfg, unsigned needs) {
  Dataset ds;
  const bool optional_audit = (needs & kNeedAudit) == 0;
  if ((needs & kNeedTweets) || !cfg.tweets_path.empty()) {
    if (needs & kNeedTweets) {
      auto in = open_input(cfg.tweets_path, "tweets");
      auto parsed = parse_tweet_archive(in);
      ds.tweets = std::move(parsed.records);
      ds.tweet_errors = std::move(parsed.errors);
      ds.has_tweets = true;
    } else if (fs::exists(cfg.tweets_path)) {
      std::ifstream in(cfg.tweets_path, std::ios::binary);
      auto parsed = parse_tweet_archive(in);
      ds.tweets = std::move(parsed.records);
      ds.tweet_errors = std::move(parsed.errors);
      ds.has_tweets = true;
    }
  }
  if ((needs & kNeedRates)) {
    auto in = open_input(cfg.rates_path, "rates");
    ds.rates = parse_rate_series(in, cfg.pair);
    ds.has_rates = true;
  } else if (!cfg.rates_path.empty() && fs::exists(cfg.rates_path)) {
    std::ifstream in(cfg.rates_path, std::ios::binary);
    ds.rates = parse_rate_series(in, cfg.pair);
    ds.has_rates = true;
  }
  if ((needs & kNeedEvents)) {
    auto in = open_input(cfg.events_path, "events");
    ds.events = parse_event_list(in);
    ds.has_events = true;
  } else if (!cfg.events_path.empty() && fs::exists(cfg.events_path)) {
    std::ifstream in(cfg.events_path, std::ios::binary);
    ds.events = parse_event_list(in);
    ds.has_events = true;
  }
  if ((needs & kNeedAudit) || (!cfg.audit_path.empty() && fs::exists(cfg.audit_path))) {
    if (!optional_audit || fs::exists(cfg.audit_path)) {
      auto in = open_input(cfg.audit_path, "audit");
      ds.audit = parse_deletion_audit(in);
      ds.has_audit = true;
    }
  }
  if (ds.has_audit && ds.has_tweets)
    ds.audit_result = apply_deletion_audit(ds.tweets, ds.audit, cfg.audit_latest_wins);
  return ds;
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory: " + cfg.out_dir);
}

fs::path out_path(const PipelineConfig& cfg, const char* name) {
  return fs::path(cfg.out_dir) / name;
}

// ---- model handling ------------------------------------------------------

std::vector<LabeledVector> labeled_vectors(const std::vector<TweetRecord>& tweets,
                                           std::uint32_t dim) {
  // Training and evaluation run over gold-labeled tweets in time order.
  std::vector<const TweetRecord*> labeled;
  for (const auto& t : tweets)
    if (t.gold_label) labeled.push_back(&t);
  std::stable_sort(labeled.begin(), labeled.end(), [](const TweetRecord* a, const TweetRecord* b) {
    return a->timestamp < b->timestamp;
  });
  std::vector<LabeledVector> out;
  out.reserve(labeled.size());
  for (const TweetRecord* t : labeled) out.push_back({featurize(t->text, dim), *t->gold_label});
  return out;
}

std::vector<CvExample> labeled_examples(const std::vector<TweetRecord>& tweets, std::uint32_t dim) {
  std::vector<const TweetRecord*> labeled;
  for (const auto& t : tweets)
    if (t.gold_label) labeled.push_back(&t);
  std::stable_sort(labeled.begin(), labeled.end(), [](const TweetRecord* a, const TweetRecord* b) {
    return a->timestamp < b->timestamp;
  });
  std::vector<CvExample> out;
  out.reserve(labeled.size());
  for (const TweetRecord* t : labeled)
    out.push_back({t->timestamp, featurize(t->text, dim), *t->gold_label});
  return out;
}

TwoPlaneModel train_from(const PipelineConfig& cfg, const std::vector<TweetRecord>& tweets,
                         std::vector<std::string>* warnings) {
  auto data = labeled_vectors(tweets, cfg.dim);
  if (data.empty())
    throw Error(Errc::data, "no gold-labeled tweets to train on");
  TrainParams params{cfg.lambda, cfg.epochs, cfg.seed};
  return train_two_plane(data, params, warnings);
}

void save_model_file(const TwoPlaneModel& model, const std::string& path) {
  std::ostringstream ss;
  save_model(model, ss);
  write_file_atomic(path, ss.str());
}

TwoPlaneModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open model file: " + path);
  return load_model(in);
}

/// Loads the model file when it exists, otherwise trains from gold labels and
/// saves the result so later stages agree with this run.
TwoPlaneModel load_or_train(const PipelineConfig& cfg, const Dataset& ds) {
  const std::string path = cfg.effective_model_path();
  if (fs::exists(path)) return load_model_file(path);
  TwoPlaneModel model = train_from(cfg, ds.tweets, nullptr);
  ensure_out_dir(cfg);
  save_model_file(model, path);
  return model;
}

// ---- shared per-run state ------------------------------------------------

struct Prepared {
  TwoPlaneModel model;
  std::vector<Stance> stances;  // parallel to tweets, archive order
  std::map<std::string, UserProfile> profiles;
  std::map<std::string, UserGroup> group_of;
  std::vector<ClassifiedTweet> by_time;  // sorted by (t, archive order)
};

Prepared prepare(const PipelineConfig& cfg, const Dataset& ds) {
  Prepared p;
  p.model = load_or_train(cfg, ds);
  p.stances.reserve(ds.tweets.size());
  for (const auto& t : ds.tweets)
    p.stances.push_back(classify_stance(p.model, featurize(t.text, p.model.dim)));
  p.profiles = build_profiles(ds.tweets, cfg.rules);
  for (const auto& [author, profile] : p.profiles)
    p.group_of.emplace(author, classify_user(profile, cfg.rules));
  p.by_time.reserve(ds.tweets.size());
  for (std::size_t i = 0; i < ds.tweets.size(); ++i) {
    const auto& t = ds.tweets[i];
    p.by_time.push_back({t.timestamp, p.stances[i], p.group_of.at(t.author_id), t.deleted});
  }
  std::stable_sort(p.by_time.begin(), p.by_time.end(),
                   [](const ClassifiedTweet& a, const ClassifiedTweet& b) { return a.t < b.t; });
  return p;
}

// ---- writers -------------------------------------------------------------

void write_ingest_report(const PipelineConfig& cfg, const Dataset& ds) {
  json j;
  if (ds.has_tweets) {
    json errors = json::array();
    for (const auto& e : ds.tweet_errors)
      errors.push_back({{"line", e.line}, {"message", e.message}});
    std::size_t deleted = 0;
    for (const auto& t : ds.tweets)
      if (t.deleted) ++deleted;
    j["tweets"] = {{"parsed", ds.tweets.size()},
                   {"error_count", ds.tweet_errors.size()},
                   {"errors", errors},
                   {"deleted", deleted}};
  }
  if (ds.has_rates) j["rates"] = {{"pair", ds.rates.pair}, {"points", ds.rates.points.size()}};
  if (ds.has_events) j["events"] = {{"count", ds.events.size()}};
  if (ds.has_audit) {
    j["audit"] = {{"entries", ds.audit.size()},
                  {"matched_dead", ds.audit_result.matched_dead},
                  {"matched_alive", ds.audit_result.matched_alive},
                  {"unmatched_ids", ds.audit_result.unmatched_ids}};
    if (!ds.tweets.empty())
      j["audit"]["deleted_fraction"] =
          static_cast<double>(ds.audit_result.matched_dead) / static_cast<double>(ds.tweets.size());
  }
  write_file_atomic(out_path(cfg, "ingest_report.json"), j.dump(2) + "\n");
}

void write_stances_csv(const PipelineConfig& cfg, const Dataset& ds, const Prepared& p) {
  std::ostringstream out;
  out << "tweet_id,stance\n";
  for (std::size_t i = 0; i < ds.tweets.size(); ++i)
    out << csv_field(ds.tweets[i].id) << "," << to_string(p.stances[i]) << "\n";
  write_file_atomic(out_path(cfg, "stances.csv"), out.str());
}

void write_group_files(const PipelineConfig& cfg, const Dataset& ds, const Prepared& p) {
  std::ostringstream ug;
  ug << "author_id,group,tweets,days_active,retweeted,bot_pattern_tweets,t_rate,retweeted_ratio,"
        "t_bot_rate\n";
  for (const auto& [author, profile] : p.profiles) {
    ug << csv_field(author) << "," << to_string(p.group_of.at(author)) << "," << profile.tweets
       << "," << profile.days_active << "," << profile.retweeted << ","
       << profile.bot_pattern_tweets << "," << format_double(profile.t_rate()) << ","
       << format_double(profile.retweeted_ratio()) << "," << format_double(profile.t_bot_rate())
       << "\n";
  }
  write_file_atomic(out_path(cfg, "user_groups.csv"), ug.str());

  const GroupReport report = group_report(p.profiles, ds.tweets, p.model, cfg.rules);
  std::ostringstream gr;
  gr << "group,users,user_share,tweets,tweet_share,buy_share,hold_share,sell_share\n";
  for (int gi = 0; gi < 5; ++gi) {
    const GroupStats& s = report.groups[gi];
    const double denom = s.tweets > 0 ? static_cast<double>(s.tweets) : 1.0;
    gr << to_string(static_cast<UserGroup>(gi)) << "," << s.users << ","
       << format_double(s.user_share) << "," << s.tweets << "," << format_double(s.tweet_share)
       << "," << format_double(static_cast<double>(s.stance_counts[stance_index(Stance::Buy)]) / denom)
       << "," << format_double(static_cast<double>(s.stance_counts[stance_index(Stance::Hold)]) / denom)
       << "," << format_double(static_cast<double>(s.stance_counts[stance_index(Stance::Sell)]) / denom)
       << "\n";
  }
  write_file_atomic(out_path(cfg, "group_report.csv"), gr.str());
}

}  // namespace

std::string render_car_curves_csv(const StudyResult& study) {
  std::ostringstream out;
  out << "group,class,lag_min,mean_car,stderr,n_events\n";
  for (Stance label : {Stance::Buy, Stance::Hold, Stance::Sell}) {
    const CarCurve& c = study.curves[stance_index(label)];
    for (std::size_t lag = 0; lag < c.mean_car.size(); ++lag) {
      if (c.n_at_lag[lag] == 0) continue;
      out << c.group << "," << to_string(label) << "," << lag << ","
          << format_double(c.mean_car[lag]) << "," << format_double(c.stderr_car[lag]) << ","
          << c.n_at_lag[lag] << "\n";
    }
  }
  return out.str();
}

std::string render_events_detail_csv(const StudyResult& study) {
  std::ostringstream out;
  out << "event_id,timestamp,source,label,n_buy,n_hold,n_sell,score,slope,lags,skip_reason\n";
  for (const auto& d : study.details) {
    out << d.event.event_id << "," << format_utc(d.event.timestamp) << ","
        << to_string(d.event.source) << "," << to_string(d.cls.label) << "," << d.cls.n_buy << ","
        << d.cls.n_hold << "," << d.cls.n_sell << "," << d.cls.score() << ",";
    if (d.model) out << format_double(d.model->slope);
    out << "," << d.car.size() << "," << d.skip_reason << "\n";
  }
  return out.str();
}

std::string render_car_comparison_csv(const CarComparison& cmp) {
  std::ostringstream out;
  out << "group,class,lag_min,car_all,car_excluded,diff\n";
  for (Stance label : {Stance::Buy, Stance::Hold, Stance::Sell}) {
    const CarCurve& a = cmp.all.curves[stance_index(label)];
    const CarCurve& b = cmp.excluded.curves[stance_index(label)];
    const std::size_t len = std::max(a.mean_car.size(), b.mean_car.size());
    for (std::size_t lag = 0; lag < len; ++lag) {
      const bool has_a = lag < a.mean_car.size() && a.n_at_lag[lag] > 0;
      const bool has_b = lag < b.mean_car.size() && b.n_at_lag[lag] > 0;
      if (!has_a && !has_b) continue;
      out << (has_a ? a.group : b.group) << "," << to_string(label) << "," << lag << ",";
      if (has_a) out << format_double(a.mean_car[lag]);
      out << ",";
      if (has_b) out << format_double(b.mean_car[lag]);
      out << ",";
      if (has_a && has_b) out << format_double(a.mean_car[lag] - b.mean_car[lag]);
      out << "\n";
    }
  }
  return out.str();
}

std::string render_eval_report_json(const EvalReport& report, const PipelineConfig& cfg) {
  json j;
  json folds = json::array();
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const FoldResult& f = report.folds[i];
    json fold = {{"index", i},
                 {"begin", f.begin},
                 {"end", f.end},
                 {"first_time", format_utc(f.t_first)},
                 {"last_time", format_utc(f.t_last)},
                 {"accuracy", f.accuracy},
                 {"f1_buy_sell", f.f1}};
    folds.push_back(std::move(fold));
  }
  j["folds"] = std::move(folds);
  j["accuracy_mean"] = report.accuracy_mean;
  j["accuracy_std"] = report.accuracy_std;
  j["f1_mean"] = report.f1_mean;
  j["f1_std"] = report.f1_std;
  j["pooled_accuracy"] = accuracy_from(report.pooled);
  j["pooled_f1_buy_sell"] = f1_buy_sell(report.pooled);
  json rows = json::array();
  for (Stance g : {Stance::Buy, Stance::Hold, Stance::Sell}) {
    json row = json::array();
    for (Stance p : {Stance::Buy, Stance::Hold, Stance::Sell})
      row.push_back(report.pooled[stance_index(g)][stance_index(p)]);
    rows.push_back(std::move(row));
  }
  j["confusion"] = {{"label_order", {"buy", "hold", "sell"}}, {"rows_gold", rows}};
  j["notes"] = report.notes;
  j["params"] = {{"dim", cfg.dim},
                 {"lambda", cfg.lambda},
                 {"epochs", cfg.epochs},
                 {"seed", cfg.seed},
                 {"folds", cfg.folds}};
  return j.dump(2) + "\n";
}

namespace {

void write_deletion_files(const PipelineConfig& cfg, const Dataset& ds, const Prepared& p) {
  const ForensicsReport fr =
      forensics_report(ds.tweets, p.stances, p.group_of, cfg.typo, cfg.lexicon);

  std::ostringstream hist;
  hist << "group,bin,users\n";
  for (int gi = 0; gi < 5; ++gi)
    for (std::size_t b = 0; b < kDeletionBins; ++b)
      hist << to_string(static_cast<UserGroup>(gi)) << "," << kDeletionBinLabels[b] << ","
           << fr.histogram[gi][b] << "\n";
  write_file_atomic(out_path(cfg, "deletion_histogram.csv"), hist.str());

  const DeletionBreakdown& bd = fr.breakdown;
  std::ostringstream br;
  br << "category,count\n";
  br << "repost," << bd.repost_count() << "\n";
  br << "typo," << bd.typo_deletions.size() << "\n";
  br << "retweet," << bd.deleted_retweet_ids.size() << "\n";
  br << "recommendation," << bd.recommendation_ids.size() << "\n";
  br << "unexplained," << bd.unexplained_ids.size() << "\n";
  br << "total_deleted," << bd.total_deleted << "\n";
  br << "unique_deleted," << bd.unique_deleted << "\n";
  write_file_atomic(out_path(cfg, "deletion_breakdown.csv"), br.str());

  std::ostringstream st;
  st << "group,stance,count,percent\n";
  for (int gi = 0; gi < 5; ++gi) {
    for (Stance s : {Stance::Buy, Stance::Hold, Stance::Sell}) {
      const auto& cell = fr.stance_table[gi][stance_index(s)];
      const double pct =
          cell.total > 0 ? 100.0 * static_cast<double>(cell.deleted) / static_cast<double>(cell.total)
                         : 0.0;
      st << to_string(static_cast<UserGroup>(gi)) << "," << to_string(s) << "," << cell.deleted
         << "," << format_double(pct) << "\n";
    }
  }
  write_file_atomic(out_path(cfg, "deleted_stance.csv"), st.str());
}

void write_car_comparison(const PipelineConfig& cfg, const Dataset& ds, const Prepared& p) {
  const GroupFilter filter = group_filter_from_csv(cfg.groups);
  const StudyConfig sc{cfg.window_days, cfg.horizon, cfg.theta};
  const CarComparison cmp = car_removal_comparison(ds.events, ds.rates, p.by_time, filter, sc);
  write_file_atomic(out_path(cfg, "car_comparison.csv"), render_car_comparison_csv(cmp));
}

void run_event_study_stage(const PipelineConfig& cfg, const Dataset& ds, const Prepared& p) {
  const GroupFilter filter = group_filter_from_csv(cfg.groups);
  const StudyConfig sc{cfg.window_days, cfg.horizon, cfg.theta};
  const StudyResult study = run_event_study(ds.events, ds.rates, p.by_time, filter, sc);
  write_file_atomic(out_path(cfg, "car_curves.csv"), render_car_curves_csv(study));
  write_file_atomic(out_path(cfg, "events_detail.csv"), render_events_detail_csv(study));
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg, const std::string& subcommand) {
  if (!is_subcommand(subcommand))
    throw Error(Errc::invalid_argument, "unknown subcommand \"" + subcommand + "\"");

  if (subcommand == "synth") {
    SyntheticSpec spec = SyntheticSpec::defaults();
    if (!cfg.synth_spec_path.empty()) spec = SyntheticSpec::from_file(cfg.synth_spec_path);
    if (!spec.seed_from_file) spec.seed = cfg.seed;
    ensure_out_dir(cfg);
    generate_synthetic(spec, cfg.out_dir);
    return;
  }
  if (subcommand == "ingest") {
    Dataset ds = load_inputs(cfg, kNeedTweets);
    ensure_out_dir(cfg);
    write_ingest_report(cfg, ds);
    return;
  }
  if (subcommand == "train") {
    Dataset ds = load_inputs(cfg, kNeedTweets);
    std::vector<std::string> warnings;
    TwoPlaneModel model = train_from(cfg, ds.tweets, &warnings);
    ensure_out_dir(cfg);
    save_model_file(model, cfg.effective_model_path());
    return;
  }
  if (subcommand == "eval") {
    Dataset ds = load_inputs(cfg, kNeedTweets);
    auto examples = labeled_examples(ds.tweets, cfg.dim);
    if (examples.empty()) throw Error(Errc::data, "no gold-labeled tweets to evaluate on");
    TrainParams params{cfg.lambda, cfg.epochs, cfg.seed};
    const EvalReport report = blocked_cv(examples, cfg.folds, params);
    ensure_out_dir(cfg);
    write_file_atomic(out_path(cfg, "eval_report.json"), render_eval_report_json(report, cfg));
    return;
  }
  if (subcommand == "classify") {
    Dataset ds = load_inputs(cfg, kNeedTweets);
    Prepared p = prepare(cfg, ds);
    ensure_out_dir(cfg);
    write_stances_csv(cfg, ds, p);
    return;
  }
  if (subcommand == "groups") {
    Dataset ds = load_inputs(cfg, kNeedTweets);
    Prepared p = prepare(cfg, ds);
    ensure_out_dir(cfg);
    write_group_files(cfg, ds, p);
    return;
  }
  if (subcommand == "event-study") {
    Dataset ds = load_inputs(cfg, kNeedTweets | kNeedRates | kNeedEvents);
    Prepared p = prepare(cfg, ds);
    ensure_out_dir(cfg);
    run_event_study_stage(cfg, ds, p);
    return;
  }
  if (subcommand == "deletions") {
    Dataset ds = load_inputs(cfg, kNeedTweets | kNeedRates | kNeedEvents | kNeedAudit);
    Prepared p = prepare(cfg, ds);
    ensure_out_dir(cfg);
    write_deletion_files(cfg, ds, p);
    write_car_comparison(cfg, ds, p);
    return;
  }
  // report: the whole chain over every provided input.
  Dataset ds = load_inputs(cfg, kNeedTweets | kNeedRates | kNeedEvents | kNeedAudit);
  Prepared p = prepare(cfg, ds);
  ensure_out_dir(cfg);
  write_ingest_report(cfg, ds);
  write_stances_csv(cfg, ds, p);
  write_group_files(cfg, ds, p);
  run_event_study_stage(cfg, ds, p);
  write_deletion_files(cfg, ds, p);
  write_car_comparison(cfg, ds, p);
}

}  // namespace fxp
