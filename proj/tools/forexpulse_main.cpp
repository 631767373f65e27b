#include <cstdio>
#include <cstdlib>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "forexpulse.h"

namespace {

// Option values stay strings; the library parses and validates every key so
// the CLI and config files share one rulebook and one set of messages.
struct OptionBag {
  std::string config;
  std::deque<std::string> values;  // deque: bound addresses never move
  std::vector<std::pair<CLI::Option*, std::pair<const char*, const std::string*>>> passed;
  std::vector<CLI::Option*> latest_wins_flags;
  bool show_config = false;
};

void add_common(CLI::App* cmd, OptionBag& bag) {
  auto reg = [&](const char* flag, const char* key, const char* desc) {
    bag.values.emplace_back();
    std::string* dst = &bag.values.back();
    CLI::Option* opt = cmd->add_option(flag, *dst, desc);
    bag.passed.push_back({opt, {key, dst}});
  };
  reg("--tweets", "tweets", "tweet archive, one JSON object per line");
  reg("--rates", "rates", "exchange-rate series CSV (timestamp,price)");
  reg("--events", "events", "announcement list CSV (timestamp,source,description)");
  reg("--audit", "audit", "deletion audit, one JSON object per line");
  reg("--model", "model", "stance model file to load, or to write after training");
  reg("--out", "out", "output directory (default: out)");
  reg("--pair", "pair", "currency pair label for reports (default: EURUSD)");
  reg("--dim", "dim", "feature space size; a power of two, at least 1024");
  reg("--lambda", "lambda", "training regularization strength");
  reg("--epochs", "epochs", "training passes over the data");
  reg("--seed", "seed", "seed for training shuffles and synthetic corpora");
  reg("--folds", "folds", "blocked cross-validation fold count");
  reg("--window-days", "window_days", "market-model window before each event, days");
  reg("--horizon", "horizon", "cumulative-return horizon, traded minutes");
  reg("--theta", "theta", "vote threshold for event classification");
  reg("--groups", "groups", "user groups in the study, e.g. company,individual or all");
  reg("--synth-spec", "synth_spec", "synthetic corpus recipe (JSON)");
  cmd->add_option("--config", bag.config, "config file; $FOREXPULSE_CONFIG is the fallback");
  bag.latest_wins_flags.push_back(
      cmd->add_flag("--audit-latest-wins", "let the newest audit entry win conflicts"));
  cmd->add_flag("--show-config", bag.show_config, "print the effective configuration and exit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("forexpulse ") + fxp_version() +
               " — announcement event studies over tweet stance, user segmentation and "
               "deletion forensics"};
  app.require_subcommand(1);

  static const std::pair<const char*, const char*> kCommands[] = {
      {"ingest", "validate inputs and write an ingest report"},
      {"train", "train the stance classifier on gold-labeled tweets"},
      {"eval", "blocked cross-validation of the stance classifier"},
      {"classify", "write per-tweet stance predictions"},
      {"groups", "segment users and report group composition"},
      {"event-study", "cumulative abnormal returns around announcements"},
      {"deletions", "deletion forensics: categories, histogram, stance table"},
      {"report", "run every stage into one output directory"},
      {"synth", "generate a synthetic corpus with planted ground truth"},
  };

  OptionBag bag;
  for (const auto& [name, desc] : kCommands) add_common(app.add_subcommand(name, desc), bag);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  fxp_config* cfg = fxp_config_new();
  if (!cfg) {
    std::fprintf(stderr, "forexpulse: out of memory\n");
    return 2;
  }
  auto die = [&](fxp_status st) {
    std::fprintf(stderr, "forexpulse: %s\n", fxp_last_error());
    fxp_config_free(cfg);
    return fxp_status_exit_code(st);
  };

  std::string config_path = bag.config;
  if (config_path.empty())
    if (const char* env = std::getenv("FOREXPULSE_CONFIG")) config_path = env;
  if (!config_path.empty())
    if (fxp_status st = fxp_config_load_file(cfg, config_path.c_str()); st != FXP_OK) return die(st);

  for (const auto& [opt, kv] : bag.passed)
    if (opt->count() > 0)
      if (fxp_status st = fxp_config_set(cfg, kv.first, kv.second->c_str()); st != FXP_OK)
        return die(st);
  for (CLI::Option* f : bag.latest_wins_flags)
    if (f->count() > 0)
      if (fxp_status st = fxp_config_set(cfg, "audit_latest_wins", "true"); st != FXP_OK)
        return die(st);

  if (bag.show_config) {
    char* text = nullptr;
    if (fxp_status st = fxp_config_render(cfg, &text); st != FXP_OK) return die(st);
    std::fputs(text, stdout);
    fxp_string_free(text);
    fxp_config_free(cfg);
    return 0;
  }

  if (fxp_status st = fxp_run(cfg, command.c_str()); st != FXP_OK) return die(st);
  fxp_config_free(cfg);
  return 0;
}
