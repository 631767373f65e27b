#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fxp {

// Seconds since the Unix epoch, UTC. All window arithmetic is UTC.
using Timestamp = std::int64_t;

// Trading stance toward EUR vs. USD. Ordinal: Sell < Hold < Buy.
enum class Stance { Sell = 0, Hold = 1, Buy = 2 };

constexpr int stance_index(Stance s) { return static_cast<int>(s); }

inline const char* to_string(Stance s) {
  switch (s) {
    case Stance::Sell: return "sell";
    case Stance::Hold: return "hold";
    case Stance::Buy: return "buy";
  }
  return "?";
}

inline std::optional<Stance> stance_from_string(std::string_view s) {
  if (s == "sell") return Stance::Sell;
  if (s == "hold") return Stance::Hold;
  if (s == "buy") return Stance::Buy;
  return std::nullopt;
}

enum class Errc {
  invalid_argument,  // bad parameters, missing inputs, malformed config
  io,                // file system failures
  parse,             // malformed archive content
  data,              // content that parses but violates a data contract
  numeric,           // numerical degeneracy
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct TweetRecord {
  std::string id;
  std::string author_id;
  Timestamp timestamp = 0;
  std::string text;
  bool is_retweet = false;
  std::optional<std::string> retweet_of;  // present iff is_retweet
  std::int64_t retweet_count = 0;         // times others retweeted this tweet
  std::optional<Stance> gold_label;
  bool deleted = false;                   // set by the deletion audit
  std::optional<Timestamp> audit_time;

  bool operator==(const TweetRecord&) const = default;
};

struct RatePoint {
  Timestamp t = 0;
  double price = 0.0;
};

/// Minute-resolution price series for one currency pair. Timestamps are
/// strictly increasing; market-closure gaps are preserved, never interpolated.
struct RateSeries {
  std::string pair;
  std::vector<RatePoint> points;
};

enum class EventSource { ECB, FED, GOV };

inline const char* to_string(EventSource s) {
  switch (s) {
    case EventSource::ECB: return "ECB";
    case EventSource::FED: return "FED";
    case EventSource::GOV: return "GOV";
  }
  return "?";
}

inline std::optional<EventSource> event_source_from_string(std::string_view s) {
  if (s == "ECB") return EventSource::ECB;
  if (s == "FED") return EventSource::FED;
  if (s == "GOV") return EventSource::GOV;
  return std::nullopt;
}

struct AnnouncementEvent {
  std::string event_id;
  Timestamp timestamp = 0;
  EventSource source = EventSource::ECB;
  std::string description;
};

struct DeletionAuditEntry {
  std::string tweet_id;
  bool alive = true;
  Timestamp checked_at = 0;
};

}  // namespace fxp
