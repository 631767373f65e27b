#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "timeutil.hpp"
#include "util.hpp"

namespace fxp {

namespace {

using nlohmann::json;

std::string row_msg(std::size_t row, const std::string& what) {
  return what + " at row " + std::to_string(row);
}

// Reads a line and strips a trailing '\r' so CRLF archives parse the same.
bool get_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

Timestamp require_time(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw Error(Errc::parse, std::string("missing or non-string \"") + key + "\"");
  auto t = parse_utc(j[key].get<std::string>());
  if (!t) throw Error(Errc::parse, std::string("bad timestamp in \"") + key + "\": " + j[key].get<std::string>());
  return *t;
}

TweetRecord tweet_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::parse, "line is not a JSON object");
  TweetRecord t;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    throw Error(Errc::parse, "missing or empty \"id\"");
  t.id = j["id"].get<std::string>();
  if (!j.contains("user_id") || !j["user_id"].is_string())
    throw Error(Errc::parse, "missing or non-string \"user_id\"");
  t.author_id = j["user_id"].get<std::string>();
  t.timestamp = require_time(j, "timestamp");
  if (!j.contains("text") || !j["text"].is_string())
    throw Error(Errc::parse, "missing or non-string \"text\"");
  t.text = j["text"].get<std::string>();
  if (j.contains("is_retweet")) {
    if (!j["is_retweet"].is_boolean()) throw Error(Errc::parse, "\"is_retweet\" must be boolean");
    t.is_retweet = j["is_retweet"].get<bool>();
  }
  if (j.contains("retweet_of")) {
    if (!j["retweet_of"].is_string()) throw Error(Errc::parse, "\"retweet_of\" must be a string");
    t.retweet_of = j["retweet_of"].get<std::string>();
  }
  if (t.is_retweet != t.retweet_of.has_value())
    throw Error(Errc::parse, "\"retweet_of\" must be present exactly when \"is_retweet\" is true");
  if (j.contains("retweet_count")) {
    if (!j["retweet_count"].is_number_integer())
      throw Error(Errc::parse, "\"retweet_count\" must be an integer");
    t.retweet_count = j["retweet_count"].get<std::int64_t>();
    if (t.retweet_count < 0) throw Error(Errc::parse, "\"retweet_count\" must be >= 0");
  }
  if (j.contains("gold_label")) {
    if (!j["gold_label"].is_string()) throw Error(Errc::parse, "\"gold_label\" must be a string");
    auto s = stance_from_string(j["gold_label"].get<std::string>());
    if (!s) throw Error(Errc::parse, "\"gold_label\" must be buy, hold or sell");
    t.gold_label = *s;
  }
  if (j.contains("deleted")) {
    if (!j["deleted"].is_boolean()) throw Error(Errc::parse, "\"deleted\" must be boolean");
    t.deleted = j["deleted"].get<bool>();
  }
  if (j.contains("audit_time")) t.audit_time = require_time(j, "audit_time");
  return t;
}

}  // namespace

TweetParseResult parse_tweet_archive(std::istream& in) {
  TweetParseResult out;
  std::unordered_map<std::string, std::size_t> line_of_id;
  std::string line;
  std::size_t lineno = 0;
  while (get_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    TweetRecord rec;
    try {
      json j = json::parse(line);
      rec = tweet_from_json(j);
    } catch (const json::exception& e) {
      out.errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
      continue;
    } catch (const Error& e) {
      out.errors.push_back({lineno, e.what()});
      continue;
    }
    auto [it, inserted] = line_of_id.try_emplace(rec.id, lineno);
    if (!inserted) {
      out.errors.push_back({lineno, "duplicate id \"" + rec.id + "\": line " +
                                        std::to_string(lineno) + " duplicates line " +
                                        std::to_string(it->second) + "; first occurrence kept"});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_tweet(const TweetRecord& t) {
  json j;
  j["id"] = t.id;
  j["user_id"] = t.author_id;
  j["timestamp"] = format_utc(t.timestamp);
  j["text"] = t.text;
  j["is_retweet"] = t.is_retweet;
  if (t.retweet_of) j["retweet_of"] = *t.retweet_of;
  j["retweet_count"] = t.retweet_count;
  if (t.gold_label) j["gold_label"] = to_string(*t.gold_label);
  if (t.deleted) j["deleted"] = true;
  if (t.audit_time) j["audit_time"] = format_utc(*t.audit_time);
  return j.dump();
}

RateSeries parse_rate_series(std::istream& in, std::string pair) {
  RateSeries series;
  series.pair = std::move(pair);
  std::string line;
  std::size_t row = 0;
  if (!get_line(in, line)) throw Error(Errc::parse, "rates: empty input, expected header");
  ++row;
  if (trim(line) != "timestamp,price")
    throw Error(Errc::parse, "rates: expected header \"timestamp,price\"");
  while (get_line(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) throw Error(Errc::parse, row_msg(row, "rates: expected 2 fields"));
    auto t = parse_utc(trim(fields[0]));
    if (!t) throw Error(Errc::parse, row_msg(row, "rates: bad timestamp \"" + fields[0] + "\""));
    const auto pv = trim(fields[1]);
    double price = 0.0;
    auto res = std::from_chars(pv.data(), pv.data() + pv.size(), price);
    if (res.ec != std::errc() || res.ptr != pv.data() + pv.size())
      throw Error(Errc::parse, row_msg(row, "rates: bad price \"" + fields[1] + "\""));
    if (!(price > 0.0)) throw Error(Errc::data, row_msg(row, "rates: price must be positive"));
    if (!series.points.empty() && *t <= series.points.back().t)
      throw Error(Errc::data, "non-monotonic at row " + std::to_string(row));
    series.points.push_back({*t, price});
  }
  return series;
}

std::vector<AnnouncementEvent> parse_event_list(std::istream& in) {
  std::vector<AnnouncementEvent> events;
  std::string line;
  std::size_t row = 0;
  if (!get_line(in, line)) throw Error(Errc::parse, "events: empty input, expected header");
  ++row;
  if (trim(line) != "timestamp,source,description")
    throw Error(Errc::parse, "events: expected header \"timestamp,source,description\"");
  std::size_t ordinal = 0;
  while (get_line(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(line);
    } catch (const Error& e) {
      throw Error(Errc::parse, row_msg(row, std::string("events: ") + e.what()));
    }
    if (fields.size() != 3) throw Error(Errc::parse, row_msg(row, "events: expected 3 fields"));
    auto t = parse_utc(trim(fields[0]));
    if (!t) throw Error(Errc::parse, row_msg(row, "events: bad timestamp \"" + fields[0] + "\""));
    auto src = event_source_from_string(trim(fields[1]));
    if (!src)
      throw Error(Errc::data, row_msg(row, "events: unknown source \"" + std::string(trim(fields[1])) + "\""));
    AnnouncementEvent ev;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "ev%06zu", ++ordinal);
    ev.event_id = idbuf;
    ev.timestamp = *t;
    ev.source = *src;
    ev.description = fields[2];
    events.push_back(std::move(ev));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const AnnouncementEvent& a, const AnnouncementEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  return events;
}

std::vector<DeletionAuditEntry> parse_deletion_audit(std::istream& in) {
  std::vector<DeletionAuditEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (get_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) throw Error(Errc::parse, "line is not a JSON object");
      DeletionAuditEntry e;
      if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw Error(Errc::parse, "missing or empty \"id\"");
      e.tweet_id = j["id"].get<std::string>();
      if (!j.contains("alive") || !j["alive"].is_boolean())
        throw Error(Errc::parse, "missing or non-boolean \"alive\"");
      e.alive = j["alive"].get<bool>();
      e.checked_at = require_time(j, "checked_at");
      entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(Errc::parse, "audit line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
    } catch (const Error& e) {
      throw Error(Errc::parse, "audit line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return entries;
}

AuditResult apply_deletion_audit(std::vector<TweetRecord>& tweets,
                                 const std::vector<DeletionAuditEntry>& audit,
                                 bool latest_wins) {
  std::unordered_map<std::string, TweetRecord*> by_id;
  by_id.reserve(tweets.size());
  for (auto& t : tweets) by_id.emplace(t.id, &t);

  // Resolve one verdict per audited id before touching any record.
  struct Verdict {
    bool alive = true;
    Timestamp checked_at = 0;
    bool conflict = false;
    bool seen = false;
  };
  std::map<std::string, Verdict> verdicts;  // ordered: deterministic error lists
  AuditResult result;
  std::unordered_map<std::string, bool> unmatched_seen;
  for (const auto& e : audit) {
    auto& v = verdicts[e.tweet_id];
    if (!v.seen) {
      v = {e.alive, e.checked_at, false, true};
      continue;
    }
    if (latest_wins) {
      if (e.checked_at > v.checked_at) {
        v.alive = e.alive;
        v.checked_at = e.checked_at;
        v.conflict = false;
      } else if (e.checked_at == v.checked_at && e.alive != v.alive) {
        v.conflict = true;  // same instant, opposite verdicts: unresolvable
      }
    } else {
      if (e.alive != v.alive) v.conflict = true;
      if (e.checked_at > v.checked_at) v.checked_at = e.checked_at;
    }
  }

  std::vector<std::string> conflicts;
  std::vector<std::string> early_checks;
  for (const auto& [id, v] : verdicts) {
    if (v.conflict) conflicts.push_back(id);
  }
  if (!conflicts.empty()) {
    std::string msg = "conflicting audit entries for id(s):";
    for (const auto& id : conflicts) msg += " " + id;
    throw Error(Errc::data, msg);
  }
  for (const auto& [id, v] : verdicts) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    if (v.checked_at < it->second->timestamp) early_checks.push_back(id);
  }
  if (!early_checks.empty()) {
    std::string msg = "audit checked_at precedes tweet timestamp for id(s):";
    for (const auto& id : early_checks) msg += " " + id;
    throw Error(Errc::data, msg);
  }

  for (const auto& e : audit) {
    if (!by_id.count(e.tweet_id) && !unmatched_seen[e.tweet_id]) {
      unmatched_seen[e.tweet_id] = true;
      result.unmatched_ids.push_back(e.tweet_id);
    }
  }
  for (const auto& [id, v] : verdicts) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    if (v.alive) {
      it->second->deleted = false;
      it->second->audit_time.reset();
      ++result.matched_alive;
    } else {
      it->second->deleted = true;
      it->second->audit_time = v.checked_at;
      ++result.matched_dead;
    }
  }
  return result;
}

}  // namespace fxp
