#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"
#include "usergroups.hpp"

namespace fxp {

/// An event that cannot enter the study (not enough rate history, or no rate
/// point near the event). Carries a short machine-readable reason.
class EventSkippedError : public Error {
 public:
  EventSkippedError(std::string reason, const std::string& what)
      : Error(Errc::data, what), reason_(std::move(reason)) {}
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

class NumericalDegeneracyError : public Error {
 public:
  explicit NumericalDegeneracyError(const std::string& what) : Error(Errc::numeric, what) {}
};

/// Linear trend of the pre-event window, fitted by least squares on
/// (minutes-relative-to-event, price). slope is price units per minute.
struct MarketModel {
  double slope = 0.0;
  Timestamp window_start = 0;
  Timestamp window_end = 0;  // the event instant
  std::size_t n_points = 0;
};

/// Needs at least 2 points in [event_time - window, event_time]; otherwise
/// throws EventSkippedError("insufficient_rate_history").
MarketModel fit_market_model(const RateSeries& rates, Timestamp event_time,
                             std::int64_t window_seconds);

/// pab[i] = price_i - slope * i over post-event points; i counts traded
/// minutes (one per available point), so market closures do not stretch lags.
/// rab[i] = (pab[i+1] - pab[i]) / pab[i].
struct AbnormalSeries {
  std::string event_id;
  std::vector<double> pab;
  std::vector<double> rab;
  int horizon = 0;
};

/// Lag 0 is the first rate point at or within one minute after event_time;
/// no such point throws EventSkippedError("no_lag0_point"). A pab of exactly
/// zero at a used lag throws NumericalDegeneracyError. The series truncates
/// to the data available when the horizon overruns it.
AbnormalSeries abnormal_series(const RateSeries& rates, const MarketModel& model,
                               Timestamp event_time, int horizon);

/// car[n] = sum of rab[0..n].
std::vector<double> car_curve(std::span<const double> rab);

/// One tweet reduced to what event classification needs. Sorted by (t, then
/// stable input order) when handed to classify_event / run_event_study.
struct ClassifiedTweet {
  Timestamp t = 0;
  Stance stance = Stance::Hold;
  UserGroup group = UserGroup::Other;
  bool deleted = false;
};

using GroupFilter = std::array<bool, 5>;  // indexed by group_index

/// The default filter: every named group, Other excluded.
GroupFilter default_group_filter();
GroupFilter group_filter_from_csv(std::string_view csv);  // "company,individual"
std::string group_filter_name(const GroupFilter& f);      // "company+individual"

struct EventClassification {
  std::string event_id;
  std::int64_t n_buy = 0;
  std::int64_t n_hold = 0;
  std::int64_t n_sell = 0;
  Stance label = Stance::Hold;

  std::int64_t score() const { return n_buy - n_sell; }
};

/// Counts stances of filtered tweets in [t, t + 60 min) and labels the event:
/// Buy iff score > theta, Sell iff score < -theta, otherwise Hold. An empty
/// window is a Hold event with zero counts.
EventClassification classify_event(const AnnouncementEvent& event,
                                   std::span<const ClassifiedTweet> tweets_by_time,
                                   const GroupFilter& filter, double theta,
                                   bool exclude_deleted = false);

struct StudyConfig {
  int window_days = 30;
  int horizon = 1440;  // trading minutes
  double theta = 0.0;
};

struct EventDetail {
  AnnouncementEvent event;
  EventClassification cls;
  std::optional<MarketModel> model;
  std::vector<double> car;  // empty when skipped or no usable lags
  std::string skip_reason;  // empty when the event entered the study
};

struct CarCurve {
  std::string group;  // canonical filter name
  Stance label = Stance::Hold;
  std::size_t n_events = 0;             // events aggregated into this curve
  std::vector<double> mean_car;         // per lag
  std::vector<double> stderr_car;       // sample stddev / sqrt(n), 0 when n < 2
  std::vector<std::size_t> n_at_lag;    // events covering each lag
};

struct StudyResult {
  std::array<CarCurve, 3> curves;  // indexed by stance_index
  std::vector<EventDetail> details;
};

/// Classifies every event, fits its market model, accumulates CAR curves per
/// class label. Skipped events are recorded with their reason and excluded
/// from the curves. Aggregation order is the (already sorted) event order.
StudyResult run_event_study(const std::vector<AnnouncementEvent>& events, const RateSeries& rates,
                            std::span<const ClassifiedTweet> tweets_by_time,
                            const GroupFilter& filter, const StudyConfig& cfg,
                            bool exclude_deleted = false);

}  // namespace fxp
