#pragma once

#include <cstdint>
#include <string>

#include "types.hpp"

namespace fxp {

/// Recipe for a synthetic corpus: users engineered to satisfy each
/// segmentation rule, labeled stance tweets from template pools, a minute
/// price series with a per-class abnormal drift planted after each event, and
/// deletion scenarios for every forensic category. Loadable from a JSON file;
/// defaults give a mid-sized corpus covering everything.
struct SyntheticSpec {
  std::uint64_t seed = 42;
  bool seed_from_file = false;  // a file-provided seed wins over the CLI default

  // users
  int robots = 2;
  int spammers = 1;
  int companies = 5;
  int individuals = 5;
  int others = 2;
  int robot_tweets = 300;
  int spammer_tweets = 1001;
  int other_tweets = 8;
  int labeled_per_class = 1000;

  // events and rates
  int events = 150;
  int event_window_tweets = 8;
  double car_buy = 0.001;   // CAR planted at the final lag for Buy events
  double car_hold = 0.0;
  double car_sell = -0.001;
  double noise_sigma = 0.0002;  // price noise, relative to base_price
  int horizon_min = 1440;       // drift span, minutes
  int window_min = 1440;        // pre-event rate coverage to generate
  int event_spacing_min = 3000;
  double base_price = 1.10;
  double base_slope_per_min = 5e-7;

  // deletion scenarios
  int repost_clusters = 4;
  int repost_size = 2;
  int typos = 5;
  int deleted_retweets = 3;
  int deleted_recommendations = 6;
  int deleted_other = 7;
  int car_flip_events = 1;  // events whose only window tweet is deleted

  static SyntheticSpec defaults() { return {}; }
  static SyntheticSpec from_file(const std::string& path);

  void validate() const;  // throws Error(invalid_argument) when infeasible
};

/// Writes tweets.jsonl, rates.csv, events.csv, audit.jsonl and
/// ground_truth.json into out_dir. Bit-identical output for identical spec.
/// Self-checks at the end guarantee the planted truth is recoverable: realized
/// user groups match intent and the deleted set partitions into exactly the
/// planted categories; violations raise an infeasible-spec error.
void generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

}  // namespace fxp
