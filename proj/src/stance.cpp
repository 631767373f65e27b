#include "stance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "util.hpp"

namespace fxp {

namespace {

// One-vs-rest hinge training on the augmented space (bias = constant feature).
// Keeps w = s * v so the per-step L2 shrink is O(1) instead of O(dim).
std::vector<double> train_plane(const std::vector<LabeledVector>& data, Stance target,
                                const TrainParams& p, std::uint64_t seed) {
  const std::uint32_t dim = data[0].x.dim;
  const std::size_t n = data.size();
  std::vector<double> v(static_cast<std::size_t>(dim) + 1, 0.0);
  double s = 1.0;
  auto flush = [&] {
    if (s != 1.0) {
      for (double& w : v) w *= s;
      s = 1.0;
    }
  };
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::int64_t t = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    // Fisher-Yates with explicit modulo draws: identical order everywhere.
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& ex = data[order[j]];
      const double y = ex.y == target ? 1.0 : -1.0;
      ++t;
      const double eta = 1.0 / (p.lambda * static_cast<double>(t));
      double score = v[dim];
      for (const auto& [idx, val] : ex.x.entries) score += v[idx] * val;
      score *= s;
      s *= 1.0 - eta * p.lambda;  // exactly 0 at t=1, as in the plain schedule
      if (s < 1e-9) flush();
      if (y * score < 1.0) {
        const double g = eta * y / s;
        for (const auto& [idx, val] : ex.x.entries) v[idx] += g * val;
        v[dim] += g;
      }
    }
  }
  flush();
  return v;
}

double f1_of_class(const Confusion& c, Stance cls) {
  const int i = stance_index(cls);
  const double tp = static_cast<double>(c[i][i]);
  double fp = 0.0, fn = 0.0;
  for (int g = 0; g < 3; ++g)
    if (g != i) fp += static_cast<double>(c[g][i]);
  for (int p = 0; p < 3; ++p)
    if (p != i) fn += static_cast<double>(c[i][p]);
  const double prec = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
  const double rec = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  return (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
}

bool class_is_empty(const Confusion& c, Stance cls) {
  const int i = stance_index(cls);
  std::int64_t gold = 0, pred = 0;
  for (int j = 0; j < 3; ++j) {
    gold += c[i][j];
    pred += c[j][i];
  }
  return gold == 0 && pred == 0;
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  const double n = static_cast<double>(xs.size());
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
}

double parse_double_token(std::string_view tok, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(Errc::parse, "model: bad number in " + where);
  return v;
}

}  // namespace

TwoPlaneModel train_two_plane(const std::vector<LabeledVector>& data, TrainParams params,
                              std::vector<std::string>* warnings) {
  if (!(params.lambda > 0.0))
    throw Error(Errc::invalid_argument, "lambda must be > 0");
  if (params.epochs <= 0) throw Error(Errc::invalid_argument, "epochs must be > 0");
  if (data.empty()) throw Error(Errc::invalid_argument, "training data is empty");
  const std::uint32_t dim = data[0].x.dim;
  for (const auto& ex : data)
    if (ex.x.dim != dim)
      throw Error(Errc::invalid_argument, "training vectors disagree on feature dimension");
  if (warnings) {
    std::array<std::int64_t, 3> counts{};
    for (const auto& ex : data) ++counts[stance_index(ex.y)];
    for (Stance s : {Stance::Sell, Stance::Hold, Stance::Buy})
      if (counts[stance_index(s)] == 0)
        warnings->push_back(std::string("no ") + to_string(s) + " examples in training data");
  }
  TwoPlaneModel m;
  m.dim = dim;
  m.params = params;
  auto vb = train_plane(data, Stance::Buy, params, params.seed);
  auto vs = train_plane(data, Stance::Sell, params, params.seed + 1);
  m.buy.bias = vb[dim];
  vb.pop_back();
  m.buy.weights = std::move(vb);
  m.sell.bias = vs[dim];
  vs.pop_back();
  m.sell.weights = std::move(vs);
  return m;
}

PlaneScores plane_scores(const TwoPlaneModel& m, const FeatureVector& v) {
  if (v.dim != m.dim)
    throw Error(Errc::invalid_argument,
                "feature dimension " + std::to_string(v.dim) + " does not match model dimension " +
                    std::to_string(m.dim));
  return {dot(v, m.buy.weights) + m.buy.bias, dot(v, m.sell.weights) + m.sell.bias};
}

Stance decide(PlaneScores s) {
  const bool b = s.buy > 0.0, sl = s.sell > 0.0;
  if (b && !sl) return Stance::Buy;
  if (sl && !b) return Stance::Sell;
  if (!b && !sl) return Stance::Hold;
  if (s.buy > s.sell) return Stance::Buy;
  if (s.sell > s.buy) return Stance::Sell;
  return Stance::Hold;  // exact tie
}

Stance classify_stance(const TwoPlaneModel& m, const FeatureVector& v) {
  return decide(plane_scores(m, v));
}

double accuracy_from(const Confusion& c) {
  std::int64_t correct = 0, total = 0;
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) {
      total += c[g][p];
      if (g == p) correct += c[g][p];
    }
  return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double f1_buy_sell(const Confusion& c) {
  return 0.5 * (f1_of_class(c, Stance::Buy) + f1_of_class(c, Stance::Sell));
}

EvalReport blocked_cv(const std::vector<CvExample>& data, int k, TrainParams params) {
  if (k < 2) throw Error(Errc::invalid_argument, "fold count must be >= 2");
  const std::size_t n = data.size();
  if (n < static_cast<std::size_t>(k))
    throw Error(Errc::invalid_argument, "need at least one example per fold");
  for (std::size_t i = 1; i < n; ++i)
    if (data[i].t < data[i - 1].t)
      throw Error(Errc::invalid_argument,
                  "cross-validation input must be sorted by time (violated at index " +
                      std::to_string(i) + ")");

  EvalReport report;
  const std::size_t q = n / static_cast<std::size_t>(k);
  const std::size_t r = n % static_cast<std::size_t>(k);
  std::vector<double> accs, f1s;
  std::size_t start = 0;
  for (int fold = 0; fold < k; ++fold) {
    const std::size_t size = q + (static_cast<std::size_t>(fold) < r ? 1 : 0);
    const std::size_t end = start + size;
    std::vector<LabeledVector> train;
    train.reserve(n - size);
    for (std::size_t i = 0; i < n; ++i)
      if (i < start || i >= end) train.push_back({data[i].x, data[i].y});
    std::vector<std::string> warn;
    TwoPlaneModel model = train_two_plane(train, params, &warn);
    FoldResult fr;
    fr.begin = start;
    fr.end = end;
    fr.t_first = data[start].t;
    fr.t_last = data[end - 1].t;
    for (std::size_t i = start; i < end; ++i) {
      const Stance pred = classify_stance(model, data[i].x);
      ++fr.confusion[stance_index(data[i].y)][stance_index(pred)];
    }
    fr.accuracy = accuracy_from(fr.confusion);
    fr.f1 = f1_buy_sell(fr.confusion);
    for (const auto& w : warn)
      report.notes.push_back("fold " + std::to_string(fold) + ": " + w);
    for (Stance s : {Stance::Buy, Stance::Sell})
      if (class_is_empty(fr.confusion, s))
        report.notes.push_back("fold " + std::to_string(fold) + ": class " + to_string(s) +
                               " empty in test block, F1 contribution 0");
    for (int g = 0; g < 3; ++g)
      for (int p = 0; p < 3; ++p) report.pooled[g][p] += fr.confusion[g][p];
    accs.push_back(fr.accuracy);
    f1s.push_back(fr.f1);
    report.folds.push_back(std::move(fr));
    start = end;
  }
  mean_std(accs, report.accuracy_mean, report.accuracy_std);
  mean_std(f1s, report.f1_mean, report.f1_std);
  return report;
}

void save_model(const TwoPlaneModel& m, std::ostream& out) {
  out << "twoplane v1 D=" << m.dim << " lambda=" << format_double(m.params.lambda)
      << " epochs=" << m.params.epochs << " seed=" << m.params.seed << "\n";
  out << "buy_bias " << format_double(m.buy.bias) << "\n";
  for (std::uint32_t i = 0; i < m.dim; ++i)
    if (m.buy.weights[i] != 0.0) out << "buy " << i << " " << format_double(m.buy.weights[i]) << "\n";
  out << "sell_bias " << format_double(m.sell.bias) << "\n";
  for (std::uint32_t i = 0; i < m.dim; ++i)
    if (m.sell.weights[i] != 0.0)
      out << "sell " << i << " " << format_double(m.sell.weights[i]) << "\n";
}

TwoPlaneModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse, "model: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream header(line);
  std::string magic, version, dtok, ltok, etok, stok;
  header >> magic >> version >> dtok >> ltok >> etok >> stok;
  if (magic != "twoplane" || version != "v1" || dtok.rfind("D=", 0) != 0 ||
      ltok.rfind("lambda=", 0) != 0 || etok.rfind("epochs=", 0) != 0 ||
      stok.rfind("seed=", 0) != 0)
    throw Error(Errc::parse, "model: bad header \"" + line + "\"");
  TwoPlaneModel m;
  m.dim = static_cast<std::uint32_t>(std::stoul(dtok.substr(2)));
  m.params.lambda = parse_double_token(ltok.substr(7), "header lambda");
  m.params.epochs = std::stoi(etok.substr(7));
  m.params.seed = std::stoull(stok.substr(5));
  m.buy.weights.assign(m.dim, 0.0);
  m.sell.weights.assign(m.dim, 0.0);
  bool saw_buy_bias = false, saw_sell_bias = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    const std::string where = "line " + std::to_string(lineno);
    if (tag == "buy_bias" || tag == "sell_bias") {
      std::string val;
      ls >> val;
      if (val.empty()) throw Error(Errc::parse, "model: missing value at " + where);
      (tag[0] == 'b' ? m.buy.bias : m.sell.bias) = parse_double_token(val, where);
      (tag[0] == 'b' ? saw_buy_bias : saw_sell_bias) = true;
    } else if (tag == "buy" || tag == "sell") {
      std::string itok, vtok;
      ls >> itok >> vtok;
      if (itok.empty() || vtok.empty()) throw Error(Errc::parse, "model: short line at " + where);
      const std::uint64_t idx = std::stoull(itok);
      if (idx >= m.dim) throw Error(Errc::parse, "model: index out of range at " + where);
      (tag == "buy" ? m.buy.weights : m.sell.weights)[idx] = parse_double_token(vtok, where);
    } else {
      throw Error(Errc::parse, "model: unknown line tag \"" + tag + "\" at " + where);
    }
  }
  if (!saw_buy_bias || !saw_sell_bias)
    throw Error(Errc::parse, "model: missing bias line(s)");
  return m;
}

}  // namespace fxp
