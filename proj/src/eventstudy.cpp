#include "eventstudy.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace fxp {

MarketModel fit_market_model(const RateSeries& rates, Timestamp event_time,
                             std::int64_t window_seconds) {
  if (window_seconds <= 0) throw Error(Errc::invalid_argument, "window must be positive");
  const Timestamp start = event_time - window_seconds;
  const auto& pts = rates.points;
  auto lo = std::lower_bound(pts.begin(), pts.end(), start,
                             [](const RatePoint& p, Timestamp t) { return p.t < t; });
  auto hi = std::upper_bound(pts.begin(), pts.end(), event_time,
                             [](Timestamp t, const RatePoint& p) { return t < p.t; });
  const std::size_t n = static_cast<std::size_t>(hi - lo);
  if (n < 2)
    throw EventSkippedError("insufficient_rate_history",
                            "fewer than 2 rate points in the pre-event window ending " +
                                std::to_string(event_time));
  // Two-pass centered least squares; x is minutes relative to the event
  // (non-positive in the window), so the fit is numerically tame.
  double sx = 0.0, sy = 0.0;
  for (auto it = lo; it != hi; ++it) {
    sx += static_cast<double>(it->t - event_time) / 60.0;
    sy += it->price;
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double dx = static_cast<double>(it->t - event_time) / 60.0 - mx;
    num += dx * (it->price - my);
    den += dx * dx;
  }
  if (den == 0.0)
    throw EventSkippedError("insufficient_rate_history", "degenerate pre-event window");
  MarketModel m;
  m.slope = num / den;
  m.window_start = start;
  m.window_end = event_time;
  m.n_points = n;
  return m;
}

AbnormalSeries abnormal_series(const RateSeries& rates, const MarketModel& model,
                               Timestamp event_time, int horizon) {
  if (horizon < 1) throw Error(Errc::invalid_argument, "horizon must be >= 1");
  const auto& pts = rates.points;
  auto it = std::lower_bound(pts.begin(), pts.end(), event_time,
                             [](const RatePoint& p, Timestamp t) { return p.t < t; });
  if (it == pts.end() || it->t > event_time + 60)
    throw EventSkippedError("no_lag0_point",
                            "no rate point at or within one minute after the event");
  AbnormalSeries s;
  s.horizon = horizon;
  const std::size_t avail = static_cast<std::size_t>(pts.end() - it);
  const std::size_t len = std::min<std::size_t>(avail, static_cast<std::size_t>(horizon) + 1);
  s.pab.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    s.pab.push_back((it + static_cast<std::ptrdiff_t>(i))->price -
                    model.slope * static_cast<double>(i));
  if (len >= 2) {
    s.rab.reserve(len - 1);
    for (std::size_t i = 0; i + 1 < len; ++i) {
      if (s.pab[i] == 0.0)
        throw NumericalDegeneracyError("abnormal price is exactly zero at lag " +
                                       std::to_string(i));
      s.rab.push_back((s.pab[i + 1] - s.pab[i]) / s.pab[i]);
    }
  }
  return s;
}

std::vector<double> car_curve(std::span<const double> rab) {
  std::vector<double> car;
  car.reserve(rab.size());
  double acc = 0.0;
  for (double r : rab) {
    acc += r;
    car.push_back(acc);
  }
  return car;
}

GroupFilter default_group_filter() { return {true, true, true, true, false}; }

GroupFilter group_filter_from_csv(std::string_view csv) {
  GroupFilter f{};
  std::size_t pos = 0;
  bool any = false;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string_view tok =
        trim(csv.substr(pos, comma == std::string_view::npos ? csv.size() - pos : comma - pos));
    if (!tok.empty()) {
      if (tok == "all") {
        f = {true, true, true, true, true};
        any = true;
      } else {
        auto g = group_from_string(tok);
        if (!g) throw Error(Errc::invalid_argument, "unknown user group \"" + std::string(tok) + "\"");
        f[group_index(*g)] = true;
        any = true;
      }
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!any) throw Error(Errc::invalid_argument, "empty group filter");
  return f;
}

std::string group_filter_name(const GroupFilter& f) {
  if (std::all_of(f.begin(), f.end(), [](bool b) { return b; })) return "all";
  std::string name;
  for (int i = 0; i < 5; ++i) {
    if (!f[i]) continue;
    if (!name.empty()) name += "+";
    name += to_string(static_cast<UserGroup>(i));
  }
  return name.empty() ? "none" : name;
}

EventClassification classify_event(const AnnouncementEvent& event,
                                   std::span<const ClassifiedTweet> tweets_by_time,
                                   const GroupFilter& filter, double theta,
                                   bool exclude_deleted) {
  EventClassification c;
  c.event_id = event.event_id;
  const Timestamp w0 = event.timestamp;
  const Timestamp w1 = event.timestamp + 3600;
  auto it = std::lower_bound(tweets_by_time.begin(), tweets_by_time.end(), w0,
                             [](const ClassifiedTweet& t, Timestamp v) { return t.t < v; });
  for (; it != tweets_by_time.end() && it->t < w1; ++it) {
    if (!filter[group_index(it->group)]) continue;
    if (exclude_deleted && it->deleted) continue;
    switch (it->stance) {
      case Stance::Buy: ++c.n_buy; break;
      case Stance::Hold: ++c.n_hold; break;
      case Stance::Sell: ++c.n_sell; break;
    }
  }
  const double score = static_cast<double>(c.score());
  if (score > theta) c.label = Stance::Buy;
  else if (score < -theta) c.label = Stance::Sell;
  else c.label = Stance::Hold;
  return c;
}

StudyResult run_event_study(const std::vector<AnnouncementEvent>& events, const RateSeries& rates,
                            std::span<const ClassifiedTweet> tweets_by_time,
                            const GroupFilter& filter, const StudyConfig& cfg,
                            bool exclude_deleted) {
  StudyResult result;
  const std::string group_name = group_filter_name(filter);
  std::array<std::vector<const std::vector<double>*>, 3> curves_by_label;
  for (const auto& ev : events) {
    EventDetail detail;
    detail.event = ev;
    detail.cls = classify_event(ev, tweets_by_time, filter, cfg.theta, exclude_deleted);
    try {
      const MarketModel model =
          fit_market_model(rates, ev.timestamp, static_cast<std::int64_t>(cfg.window_days) * 86400);
      detail.model = model;
      const AbnormalSeries series = abnormal_series(rates, model, ev.timestamp, cfg.horizon);
      detail.car = car_curve(series.rab);
    } catch (const EventSkippedError& e) {
      detail.skip_reason = e.reason();
    } catch (const NumericalDegeneracyError&) {
      detail.skip_reason = "numerical_degeneracy";
    }
    result.details.push_back(std::move(detail));
  }
  for (const auto& d : result.details)
    if (d.skip_reason.empty()) curves_by_label[stance_index(d.cls.label)].push_back(&d.car);

  for (int li = 0; li < 3; ++li) {
    CarCurve& curve = result.curves[li];
    curve.group = group_name;
    curve.label = static_cast<Stance>(li);
    const auto& cs = curves_by_label[li];
    curve.n_events = cs.size();
    std::size_t max_len = 0;
    for (const auto* c : cs) max_len = std::max(max_len, c->size());
    curve.mean_car.resize(max_len, 0.0);
    curve.stderr_car.resize(max_len, 0.0);
    curve.n_at_lag.resize(max_len, 0);
    for (std::size_t lag = 0; lag < max_len; ++lag) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto* c : cs)
        if (lag < c->size()) {
          sum += (*c)[lag];
          ++n;
        }
      curve.n_at_lag[lag] = n;
      if (n == 0) continue;
      const double mean = sum / static_cast<double>(n);
      curve.mean_car[lag] = mean;
      if (n >= 2) {
        double sq = 0.0;
        for (const auto* c : cs)
          if (lag < c->size()) sq += ((*c)[lag] - mean) * ((*c)[lag] - mean);
        curve.stderr_car[lag] =
            std::sqrt(sq / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
      }
    }
  }
  return result;
}

}  // namespace fxp
