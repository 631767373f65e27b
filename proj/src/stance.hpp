#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "featurize.hpp"
#include "types.hpp"

namespace fxp {

struct Plane {
  std::vector<double> weights;  // length = dim
  double bias = 0.0;
};

struct TrainParams {
  double lambda = 1e-4;
  int epochs = 10;
  std::uint64_t seed = 42;
};

/// Two linear planes over one hashed feature space: "buy" separates Buy from
/// {Hold, Sell}, "sell" separates Sell from {Buy, Hold}. Together with the
/// decision rule they make the three-class ordinal classifier.
struct TwoPlaneModel {
  std::uint32_t dim = 0;
  Plane buy;
  Plane sell;
  TrainParams params;  // enough to retrain bit-identically on the same data
};

struct LabeledVector {
  FeatureVector x;
  Stance y = Stance::Hold;
};

/// Hinge-loss subgradient training with eta_t = 1/(lambda*t) and L2
/// regularization; the bias rides along as a constant augmented feature.
/// Example order is a seed-determined shuffle per epoch, so results are
/// reproducible bit-for-bit for fixed data and params. Pass a warnings sink to
/// hear about missing stances in the training data.
TwoPlaneModel train_two_plane(const std::vector<LabeledVector>& data, TrainParams params,
                              std::vector<std::string>* warnings = nullptr);

struct PlaneScores {
  double buy = 0.0;
  double sell = 0.0;
};

PlaneScores plane_scores(const TwoPlaneModel& m, const FeatureVector& v);

/// Decision rule: buy side positive and sell side non-positive is Buy; the
/// mirror image is Sell; both non-positive is Hold; both positive goes to the
/// larger score and an exact tie falls back to Hold.
Stance decide(PlaneScores s);

Stance classify_stance(const TwoPlaneModel& m, const FeatureVector& v);

/// counts[gold][predicted], indexed by stance_index (Sell, Hold, Buy).
using Confusion = std::array<std::array<std::int64_t, 3>, 3>;

double accuracy_from(const Confusion& c);

/// Mean of the Buy and Sell per-class F1 scores. A class with no gold and no
/// predicted instances contributes 0 (reported by blocked_cv as a note).
double f1_buy_sell(const Confusion& c);

struct CvExample {
  Timestamp t = 0;
  FeatureVector x;
  Stance y = Stance::Hold;
};

struct FoldResult {
  std::size_t begin = 0, end = 0;  // test block [begin, end)
  Timestamp t_first = 0, t_last = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  Confusion confusion{};
};

struct EvalReport {
  std::vector<FoldResult> folds;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
  Confusion pooled{};
  std::vector<std::string> notes;
};

/// k-fold cross-validation on time-ordered data with contiguous blocks, never
/// shuffled. Earlier blocks take the larger size when n % k != 0. Unsorted
/// input is an error, not silently sorted. Stddevs are sample stddevs.
EvalReport blocked_cv(const std::vector<CvExample>& data, int k, TrainParams params);

/// Versioned text format; doubles round-trip bit-exactly.
void save_model(const TwoPlaneModel& m, std::ostream& out);
TwoPlaneModel load_model(std::istream& in);

}  // namespace fxp
