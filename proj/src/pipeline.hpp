#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manipulation.hpp"
#include "stance.hpp"
#include "usergroups.hpp"

namespace fxp {

/// Everything a run needs: input paths, output directory, model and study
/// parameters, segmentation rules. Loadable from a "key = value" file with
/// optional [patterns] and [lexicon] sections; CLI flags override file values.
struct PipelineConfig {
  std::string tweets_path;
  std::string rates_path;
  std::string events_path;
  std::string audit_path;
  std::string model_path;  // empty: <out>/model.txt
  std::string out_dir = "out";
  std::string pair = "EURUSD";

  std::uint32_t dim = 1u << 16;
  double lambda = 1e-4;
  int epochs = 10;
  std::uint64_t seed = 42;
  int folds = 10;

  int window_days = 30;
  int horizon = 1440;
  double theta = 0.0;
  std::string groups = "robot,spammer,company,individual";

  bool audit_latest_wins = false;
  std::string synth_spec_path;

  GroupRuleConfig rules = GroupRuleConfig::defaults();
  TypoRuleConfig typo;
  RecommendationLexicon lexicon = RecommendationLexicon::defaults();

  /// Sets one scalar key ("tweets", "dim", "theta", ...). List-valued keys
  /// "patterns" and "lexicon" take a |-separated value. Unknown keys or
  /// unparseable values throw Error(invalid_argument).
  void set(const std::string& key, const std::string& value);

  /// Merges a config file into this config (file values overwrite current).
  void merge_file(const std::string& path);

  /// The effective configuration in the same file format.
  std::string render() const;

  std::string effective_model_path() const;
};

extern const char* const kSubcommands[9];  // ingest train eval classify groups event-study deletions report synth
bool is_subcommand(const std::string& name);

/// Runs one subcommand end to end: load + validate inputs, compute, write the
/// subcommand's documented outputs into out_dir. Throws Error on failure.
void run_pipeline(const PipelineConfig& cfg, const std::string& subcommand);

/// Exit-code policy: 0 success, 1 validation problem, 2 data problem.
int exit_code_for(Errc code);

// Rendering helpers shared by run_pipeline and the test suites.
std::string render_car_curves_csv(const StudyResult& study);
std::string render_events_detail_csv(const StudyResult& study);
std::string render_car_comparison_csv(const CarComparison& cmp);
std::string render_eval_report_json(const EvalReport& report, const PipelineConfig& cfg);

}  // namespace fxp
