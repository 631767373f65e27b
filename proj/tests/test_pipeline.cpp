#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pipeline.hpp"
#include "synth.hpp"
#include "types.hpp"
#include "util.hpp"

using namespace fxp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fxp_pipeline_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

void spill(const fs::path& p, const std::string& text) { write_file_atomic(p.string(), text); }

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

template <typename Fn>
void check_throws_contains(Errc code, const std::string& fragment, Fn&& fn) {
  try {
    fn();
    FAIL_CHECK("expected an error containing \"" << fragment << "\"");
  } catch (const Error& e) {
    CHECK(e.code() == code);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

// Mirrors the small corpus used by the generator suite: every user group and
// every deletion category present, but tiny enough to run in milliseconds.
const char* kSmallSpecJson = R"({
  "robots": 1, "spammers": 0, "companies": 2, "individuals": 3, "others": 1,
  "robot_tweets": 20, "other_tweets": 4, "labeled_per_class": 30,
  "events": 6, "event_window_tweets": 4, "noise_sigma": 0.0,
  "horizon_min": 60, "window_min": 30, "event_spacing_min": 120,
  "repost_clusters": 2, "repost_size": 2, "typos": 2,
  "deleted_retweets": 1, "deleted_recommendations": 2, "deleted_other": 2,
  "car_flip_events": 1
})";

fs::path write_small_spec(const fs::path& dir) {
  const fs::path p = dir / "spec.json";
  spill(p, kSmallSpecJson);
  return p;
}

// Generates the small corpus into dir and returns a config whose inputs point
// at the generated files.
PipelineConfig synth_into(const fs::path& dir, std::uint64_t seed) {
  PipelineConfig gen;
  gen.synth_spec_path = write_small_spec(dir).string();
  gen.seed = seed;
  gen.out_dir = dir.string();
  run_pipeline(gen, "synth");

  PipelineConfig cfg;
  cfg.tweets_path = (dir / "tweets.jsonl").string();
  cfg.rates_path = (dir / "rates.csv").string();
  cfg.events_path = (dir / "events.csv").string();
  cfg.audit_path = (dir / "audit.jsonl").string();
  cfg.dim = 4096;
  cfg.epochs = 8;
  cfg.window_days = 1;
  cfg.horizon = 60;
  return cfg;
}

const char* const kReportFiles[] = {
    "model.txt",          "ingest_report.json",     "stances.csv",
    "user_groups.csv",    "group_report.csv",       "car_curves.csv",
    "events_detail.csv",  "deletion_histogram.csv", "deletion_breakdown.csv",
    "deleted_stance.csv", "car_comparison.csv",
};

}  // namespace

TEST_CASE("config keys update the rendered configuration") {
  PipelineConfig cfg;
  cfg.set("tweets", " data/tw.jsonl ");
  cfg.set("rates", "data/r.csv");
  cfg.set("events", "data/e.csv");
  cfg.set("audit", "data/a.jsonl");
  cfg.set("model", "m.txt");
  cfg.set("out", "results");
  cfg.set("pair", "USDJPY");
  cfg.set("dim", "4096");
  cfg.set("lambda", "0.001");
  cfg.set("epochs", "7");
  cfg.set("seed", "99");
  cfg.set("folds", "5");
  cfg.set("window_days", "14");
  cfg.set("horizon", "720");
  cfg.set("theta", "2.5");
  cfg.set("groups", "company,individual");
  cfg.set("audit_latest_wins", "true");
  cfg.set("synth_spec", "spec.json");
  cfg.set("bot_rate", "0.9");
  cfg.set("spam_tweets", "500");
  cfg.set("typo_max_following", "3");
  cfg.set("patterns", "Buy signal | Sell signal");
  cfg.set("lexicon", "buy|sell|moon");

  CHECK(cfg.tweets_path == "data/tw.jsonl");  // values are trimmed
  CHECK(cfg.pair == "USDJPY");
  CHECK(cfg.dim == 4096);
  CHECK(cfg.lambda == 0.001);
  CHECK(cfg.epochs == 7);
  CHECK(cfg.seed == 99);
  CHECK(cfg.groups == "company,individual");
  CHECK(cfg.audit_latest_wins);
  CHECK(cfg.rules.bot_rate == 0.9);
  CHECK(cfg.rules.spam_tweets == 500);
  CHECK(cfg.typo.max_following == 3);
  CHECK(cfg.rules.bot_patterns == std::vector<std::string>{"Buy signal", "Sell signal"});
  CHECK(cfg.lexicon.words == std::vector<std::string>{"buy", "sell", "moon"});

  const std::string r = cfg.render();
  CHECK(r.find("dim = 4096\n") != std::string::npos);
  CHECK(r.find("theta = 2.5\n") != std::string::npos);
  CHECK(r.find("groups = company,individual\n") != std::string::npos);
  CHECK(r.find("[patterns]\nBuy signal\nSell signal\n") != std::string::npos);
  CHECK(r.find("[lexicon]\nbuy\nsell\nmoon\n") != std::string::npos);
}

TEST_CASE("config rejects unknown keys and malformed values") {
  PipelineConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.set("wibble", "1"), "config: unknown key \"wibble\"", Error);
  CHECK_THROWS_WITH_AS(cfg.set("epochs", "ten"), "config: bad integer for \"epochs\": ten", Error);
  CHECK_THROWS_WITH_AS(cfg.set("lambda", "fast"), "config: bad number for \"lambda\": fast", Error);
  CHECK_THROWS_WITH_AS(cfg.set("audit_latest_wins", "maybe"),
                       "config: bad boolean for \"audit_latest_wins\": maybe", Error);
  CHECK_THROWS_WITH_AS(cfg.set("dim", "0"), "config: dim out of range", Error);
  CHECK_THROWS_WITH_AS(cfg.set("dim", "1073741825"), "config: dim out of range", Error);
  CHECK_NOTHROW(cfg.set("dim", "1073741824"));  // 2^30 is the inclusive cap
  // group filters are validated when set, not when first used
  CHECK_THROWS_WITH_AS(cfg.set("groups", "wizards"), "unknown user group \"wizards\"", Error);
  CHECK_NOTHROW(cfg.set("groups", "all"));
  for (const char* v : {"true", "1", "yes", "on"}) {
    cfg.set("audit_latest_wins", v);
    CHECK(cfg.audit_latest_wins);
  }
  for (const char* v : {"false", "0", "no", "off"}) {
    cfg.set("audit_latest_wins", v);
    CHECK(!cfg.audit_latest_wins);
  }
  check_throws_contains(Errc::invalid_argument, "config: unknown key",
                        [&] { cfg.set("wibble", "1"); });
}

TEST_CASE("config files merge with sections, comments and line numbers") {
  const fs::path dir = fresh_dir("cfg_merge");
  const fs::path file = dir / "fxp.conf";
  spill(file,
        "# comment\n"
        "\n"
        "dim = 2048\r\n"
        "  pair =  GBPUSD  \n"
        "[patterns]\n"
        "Buy signal\n"
        "# patterns keep raw text, comments still skipped\n"
        "Sell signal\n"
        "[lexicon]\n"
        "moon\n");
  PipelineConfig cfg;
  cfg.merge_file(file.string());
  CHECK(cfg.dim == 2048);
  CHECK(cfg.pair == "GBPUSD");
  CHECK(cfg.rules.bot_patterns == std::vector<std::string>{"Buy signal", "Sell signal"});
  CHECK(cfg.lexicon.words == std::vector<std::string>{"moon"});
  CHECK(cfg.epochs == 10);  // untouched keys keep their defaults

  // a file without the sections leaves previously merged lists alone
  const fs::path file2 = dir / "fxp2.conf";
  spill(file2, "epochs = 3\n");
  cfg.merge_file(file2.string());
  CHECK(cfg.epochs == 3);
  CHECK(cfg.rules.bot_patterns.size() == 2);
  CHECK(cfg.lexicon.words.size() == 1);
}

TEST_CASE("config file errors carry the offending line number") {
  const fs::path dir = fresh_dir("cfg_errors");
  PipelineConfig cfg;
  check_throws_contains(Errc::io, "cannot open config file: ",
                        [&] { cfg.merge_file((dir / "absent.conf").string()); });

  const fs::path bad_section = dir / "s.conf";
  spill(bad_section, "dim = 2048\n[wat]\n");
  CHECK_THROWS_WITH_AS(cfg.merge_file(bad_section.string()),
                       "config: unknown section [wat] at line 2", Error);

  const fs::path no_eq = dir / "e.conf";
  spill(no_eq, "# ok\ndim 2048\n");
  CHECK_THROWS_WITH_AS(cfg.merge_file(no_eq.string()), "config: expected key = value at line 2",
                       Error);

  const fs::path inline_patterns = dir / "p.conf";
  spill(inline_patterns, "patterns = Buy signal\n");
  CHECK_THROWS_WITH_AS(cfg.merge_file(inline_patterns.string()),
                       "config: \"patterns\" belongs in its own section", Error);
  const fs::path inline_lexicon = dir / "l.conf";
  spill(inline_lexicon, "lexicon = moon\n");
  CHECK_THROWS_WITH_AS(cfg.merge_file(inline_lexicon.string()),
                       "config: \"lexicon\" belongs in its own section", Error);

  const fs::path bad_value = dir / "v.conf";
  spill(bad_value, "# one\n# two\nepochs = ten\n");
  CHECK_THROWS_WITH_AS(cfg.merge_file(bad_value.string()),
                       "config: bad integer for \"epochs\": ten (line 3)", Error);
}

TEST_CASE("rendered configuration reloads to an identical render") {
  PipelineConfig a;
  a.set("tweets", "tw.jsonl");
  a.set("out", "results");
  a.set("dim", "8192");
  a.set("lambda", "0.00025");
  a.set("theta", "1.5");
  a.set("groups", "individual");
  a.set("audit_latest_wins", "yes");
  a.set("patterns", "Buy signal|Margin call");
  a.set("lexicon", "buy|sell|long|short");
  const std::string rendered = a.render();

  const fs::path dir = fresh_dir("cfg_roundtrip");
  const fs::path file = dir / "rendered.conf";
  spill(file, rendered);
  PipelineConfig b;
  b.merge_file(file.string());
  CHECK(b.render() == rendered);
  CHECK(b.audit_latest_wins);  // "yes" renders as "true" and survives the trip
}

TEST_CASE("model path defaults to the output directory") {
  PipelineConfig cfg;
  CHECK(cfg.effective_model_path() == (fs::path("out") / "model.txt").string());
  cfg.out_dir = "elsewhere";
  CHECK(cfg.effective_model_path() == (fs::path("elsewhere") / "model.txt").string());
  cfg.model_path = "shared/model.txt";
  CHECK(cfg.effective_model_path() == "shared/model.txt");
}

TEST_CASE("exit codes distinguish caller mistakes from data problems") {
  CHECK(exit_code_for(Errc::invalid_argument) == 1);
  CHECK(exit_code_for(Errc::io) == 1);
  CHECK(exit_code_for(Errc::parse) == 2);
  CHECK(exit_code_for(Errc::data) == 2);
  CHECK(exit_code_for(Errc::numeric) == 2);
  CHECK(exit_code_for(Errc::internal) == 2);
}

TEST_CASE("subcommand names are recognized exactly") {
  for (const char* name : kSubcommands) CHECK(is_subcommand(name));
  CHECK(!is_subcommand(""));
  CHECK(!is_subcommand("Report"));
  CHECK(!is_subcommand("evals"));
  CHECK(!is_subcommand("event_study"));

  PipelineConfig cfg;
  CHECK_THROWS_WITH_AS(run_pipeline(cfg, "frobnicate"), "unknown subcommand \"frobnicate\"", Error);
}

TEST_CASE("required inputs are reported by flag name before touching the disk") {
  PipelineConfig cfg;
  cfg.out_dir = fresh_dir("missing_inputs").string();
  check_throws_contains(Errc::invalid_argument, "missing required input: --tweets",
                        [&] { run_pipeline(cfg, "classify"); });
  cfg.tweets_path = (fs::path(cfg.out_dir) / "absent.jsonl").string();
  check_throws_contains(Errc::io, "input file not found: ",
                        [&] { run_pipeline(cfg, "classify"); });
  spill(fs::path(cfg.out_dir) / "absent.jsonl", "");
  check_throws_contains(Errc::invalid_argument, "missing required input: --rates",
                        [&] { run_pipeline(cfg, "event-study"); });
}

TEST_CASE("synth honors the spec file and the seed override") {
  const fs::path a = fresh_dir("synth_a"), b = fresh_dir("synth_b"), c = fresh_dir("synth_c");
  PipelineConfig cfg;
  cfg.synth_spec_path = write_small_spec(a).string();
  cfg.seed = 4242;

  cfg.out_dir = a.string();
  run_pipeline(cfg, "synth");
  cfg.out_dir = b.string();
  run_pipeline(cfg, "synth");
  CHECK(slurp(a / "tweets.jsonl") == slurp(b / "tweets.jsonl"));
  CHECK(slurp(a / "ground_truth.json") == slurp(b / "ground_truth.json"));
  CHECK(json::parse(slurp(a / "ground_truth.json"))["seed"] == 4242);

  cfg.seed = 9;
  cfg.out_dir = c.string();
  run_pipeline(cfg, "synth");
  CHECK(slurp(a / "tweets.jsonl") != slurp(c / "tweets.jsonl"));

  // a seed inside the spec file wins over the command-line seed
  const fs::path d = fresh_dir("synth_d");
  json spec = json::parse(kSmallSpecJson);
  spec["seed"] = 7;
  const fs::path spec_path = d / "spec.json";
  spill(spec_path, spec.dump());
  cfg.synth_spec_path = spec_path.string();
  cfg.seed = 4242;
  cfg.out_dir = d.string();
  run_pipeline(cfg, "synth");
  CHECK(json::parse(slurp(d / "ground_truth.json"))["seed"] == 7);
}

TEST_CASE("report produces the full output set and is byte-stable across runs") {
  const fs::path data = fresh_dir("report_data");
  PipelineConfig cfg = synth_into(data, 4242);
  const json truth = json::parse(slurp(data / "ground_truth.json"));

  const fs::path run1 = fresh_dir("report_run1");
  cfg.out_dir = run1.string();
  run_pipeline(cfg, "report");
  for (const char* name : kReportFiles) {
    CAPTURE(name);
    CHECK(fs::exists(run1 / name));
    CHECK(fs::file_size(run1 / name) > 0);
  }

  const std::size_t n_tweets = count_lines(slurp(data / "tweets.jsonl"));
  CHECK(n_tweets == truth["counts"]["tweets"].get<std::size_t>());
  CHECK(count_lines(slurp(run1 / "stances.csv")) == n_tweets + 1);

  const json ingest = json::parse(slurp(run1 / "ingest_report.json"));
  CHECK(ingest["tweets"]["parsed"] == n_tweets);
  CHECK(ingest["tweets"]["error_count"] == 0);
  CHECK(ingest["audit"]["matched_dead"] == truth["counts"]["deleted"]);
  CHECK(ingest["audit"]["unmatched_ids"].empty());

  CHECK(count_lines(slurp(run1 / "events_detail.csv")) ==
        truth["counts"]["events"].get<std::size_t>() + 1);
  CHECK(count_lines(slurp(run1 / "group_report.csv")) == 6);
  // one histogram row per (group, bin) pair
  CHECK(count_lines(slurp(run1 / "deletion_histogram.csv")) == 5 * 12 + 1);

  // the breakdown accounts for every audited deletion
  const std::string breakdown = slurp(run1 / "deletion_breakdown.csv");
  std::ostringstream expected_total;
  expected_total << "total_deleted," << truth["counts"]["deleted"].get<std::size_t>() << "\n";
  CHECK(breakdown.find(expected_total.str()) != std::string::npos);

  // a second run over the same inputs reproduces every file byte for byte
  const fs::path run2 = fresh_dir("report_run2");
  cfg.out_dir = run2.string();
  run_pipeline(cfg, "report");
  for (const char* name : kReportFiles) {
    CAPTURE(name);
    CHECK(slurp(run1 / name) == slurp(run2 / name));
  }
}

TEST_CASE("classify loads a saved model instead of retraining") {
  const fs::path data = fresh_dir("model_data");
  PipelineConfig cfg = synth_into(data, 4242);

  const fs::path run = fresh_dir("model_run");
  cfg.out_dir = run.string();
  run_pipeline(cfg, "classify");
  const std::string first_model = slurp(run / "model.txt");
  const std::string first_stances = slurp(run / "stances.csv");
  CHECK(first_model.rfind("twoplane v1 ", 0) == 0);

  // corrupting the model file must break classification, not trigger a retrain
  spill(run / "model.txt", "not a model\n");
  check_throws_contains(Errc::parse, "model: bad header",
                        [&] { run_pipeline(cfg, "classify"); });

  // removing it heals: classify retrains and saves an identical model
  fs::remove(run / "model.txt");
  run_pipeline(cfg, "classify");
  CHECK(slurp(run / "model.txt") == first_model);
  CHECK(slurp(run / "stances.csv") == first_stances);

  // an explicit model path is honored across output directories
  const fs::path run2 = fresh_dir("model_run2");
  cfg.out_dir = run2.string();
  cfg.model_path = (run / "model.txt").string();
  run_pipeline(cfg, "classify");
  CHECK(!fs::exists(run2 / "model.txt"));
  CHECK(slurp(run2 / "stances.csv") == first_stances);
}

TEST_CASE("train writes the model and ingest writes only its report") {
  const fs::path data = fresh_dir("train_data");
  PipelineConfig cfg = synth_into(data, 4242);

  const fs::path train_out = fresh_dir("train_out");
  cfg.out_dir = train_out.string();
  run_pipeline(cfg, "train");
  CHECK(fs::exists(train_out / "model.txt"));
  CHECK(!fs::exists(train_out / "stances.csv"));

  const fs::path ingest_out = fresh_dir("ingest_out");
  cfg.out_dir = ingest_out.string();
  run_pipeline(cfg, "ingest");
  CHECK(fs::exists(ingest_out / "ingest_report.json"));
  CHECK(!fs::exists(ingest_out / "stances.csv"));
  CHECK(!fs::exists(ingest_out / "model.txt"));
}

TEST_CASE("eval writes a complete cross-validation report") {
  const fs::path data = fresh_dir("eval_data");
  PipelineConfig cfg = synth_into(data, 4242);
  const json truth = json::parse(slurp(data / "ground_truth.json"));
  const std::size_t labeled = truth["counts"]["labeled"].get<std::size_t>();

  const fs::path out = fresh_dir("eval_out");
  cfg.out_dir = out.string();
  run_pipeline(cfg, "eval");
  const std::string text = slurp(out / "eval_report.json");
  const json rep = json::parse(text);

  const std::set<std::string> top_keys = {
      "accuracy_mean", "accuracy_std", "confusion",        "f1_mean",
      "f1_std",        "folds",        "notes",            "params",
      "pooled_accuracy", "pooled_f1_buy_sell"};
  std::set<std::string> seen;
  for (const auto& [k, v] : rep.items()) seen.insert(k);
  CHECK(seen == top_keys);

  REQUIRE(rep["folds"].size() == 10);
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < rep["folds"].size(); ++i) {
    const json& f = rep["folds"][i];
    std::set<std::string> fold_keys;
    for (const auto& [k, v] : f.items()) fold_keys.insert(k);
    CHECK(fold_keys == std::set<std::string>{"accuracy", "begin", "end", "f1_buy_sell",
                                             "first_time", "index", "last_time"});
    CHECK(f["index"] == i);
    CHECK(f["begin"] == prev_end);  // folds tile the labeled examples in time order
    prev_end = f["end"].get<std::size_t>();
    CHECK(f["accuracy"].get<double>() >= 0.0);
    CHECK(f["accuracy"].get<double>() <= 1.0);
  }
  CHECK(prev_end == labeled);

  CHECK(rep["confusion"]["label_order"] == json::array({"buy", "hold", "sell"}));
  std::size_t confusion_total = 0;
  for (const auto& row : rep["confusion"]["rows_gold"])
    for (const auto& cell : row) confusion_total += cell.get<std::size_t>();
  CHECK(confusion_total == labeled);

  CHECK(rep["params"] ==
        json({{"dim", 4096}, {"lambda", 1e-4}, {"epochs", 8}, {"seed", 42}, {"folds", 10}}));
  // the synthetic labeled pool is cleanly separable, so scores stay high
  CHECK(rep["pooled_accuracy"].get<double>() > 0.9);
  CHECK(rep["pooled_f1_buy_sell"].get<double>() > 0.9);

  // deterministic end to end: re-running yields the identical report
  const fs::path out2 = fresh_dir("eval_out2");
  cfg.out_dir = out2.string();
  run_pipeline(cfg, "eval");
  CHECK(slurp(out2 / "eval_report.json") == text);
}
