#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "types.hpp"

namespace fxp {

struct ParseError {
  std::size_t line = 0;  // 1-based physical line number
  std::string message;
};

struct TweetParseResult {
  std::vector<TweetRecord> records;  // input order, no partial records
  std::vector<ParseError> errors;
};

/// Parses one tweet per line (JSON object). Malformed lines are reported and
/// skipped; parsing always continues. A duplicate id keeps the first record
/// and reports both line numbers.
TweetParseResult parse_tweet_archive(std::istream& in);

/// Inverse of the line format: one JSON object, no trailing newline.
/// Optional fields are omitted when absent.
std::string serialize_tweet(const TweetRecord& t);

/// Parses "timestamp,price" CSV (header required). Fails fast: the first
/// non-monotonic timestamp or non-positive price aborts with the row number.
RateSeries parse_rate_series(std::istream& in, std::string pair = "EURUSD");

/// Parses "timestamp,source,description" CSV (header required). Descriptions
/// may be quoted. Result is sorted ascending by timestamp (stable for equal
/// timestamps); event ids are assigned from input order as "ev%06d".
std::vector<AnnouncementEvent> parse_event_list(std::istream& in);

/// Parses one audit entry per line (JSON object with id, alive, checked_at).
/// Fails fast on the first malformed line.
std::vector<DeletionAuditEntry> parse_deletion_audit(std::istream& in);

struct AuditResult {
  std::size_t matched_dead = 0;           // tweets newly marked deleted
  std::size_t matched_alive = 0;
  std::vector<std::string> unmatched_ids; // audit ids with no tweet, first-seen order
};

/// Marks tweets dead per the audit. Conflicting entries for an id (alive and
/// dead both present) are an error unless latest_wins, in which case the entry
/// with the greatest checked_at decides. Application is idempotent.
AuditResult apply_deletion_audit(std::vector<TweetRecord>& tweets,
                                 const std::vector<DeletionAuditEntry>& audit,
                                 bool latest_wins = false);

}  // namespace fxp
