// airink: staged pipeline driver.
//
//   airink [--config FILE] [--seed N] [--threads N] [--section.key VALUE ...] <command> ...
//
// Exit status: 0 success, 2 configuration error, 3 data error, 4 numeric or
// training failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "airink/config.hpp"
#include "airink/corpus.hpp"
#include "airink/error.hpp"
#include "airink/pipeline.hpp"

namespace fs = std::filesystem;
using namespace airink;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::config: return kExitConfig;
    case ErrorClass::data: return kExitData;
    case ErrorClass::numeric: return kExitNumeric;
  }
  return 1;
}

bool is_dotted_flag(const std::string& arg) {
  if (arg.size() < 4 || arg.rfind("--", 0) != 0) return false;
  const auto body = arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos
                                                                       : arg.find('=') - 2);
  return body.find('.') != std::string::npos;
}

// Pulls `--section.key value` and `--section.key=value` out of argv.
std::vector<std::string> take_overrides(int argc, char** argv, Overrides& overrides) {
  std::vector<std::string> rest;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (!is_dotted_flag(arg)) {
      rest.push_back(arg);
      continue;
    }
    if (const auto eq = arg.find('='); eq != std::string::npos) {
      overrides.emplace_back(arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else {
      if (i + 1 >= argc) throw ConfigError("missing value for " + arg);
      overrides.emplace_back(arg.substr(2), argv[++i]);
    }
  }
  return rest;
}

struct UnitOptions {
  int task = 13;
  std::string mode = "in_air";
  std::size_t rep = 1;
  std::size_t budget = 500;

  void add(CLI::App* cmd, bool with_budget) {
    cmd->add_option("--task", task, "Task id (13 or 16)")->required();
    cmd->add_option("--mode", mode, "in_air, on_paper or both")->required();
    cmd->add_option("--rep", rep, "Repetition, from 1")->required();
    if (with_budget) cmd->add_option("--budget", budget, "Accepted samples per class")->required();
  }

  UnitKey key(const RunConfig& config) const {
    Scenario{task, parse_mode(mode), budget}.validate();
    if (rep < 1 || rep > config.repetitions()) {
      throw ConfigError("--rep must lie in 1.." + std::to_string(config.repetitions()));
    }
    return {task, parse_mode(mode), rep};
  }
};

void print_report(const AccuracyReport& report, const RunConfig& config) {
  std::cout << report_table(report);
  std::cout << "wrote " << (config.output_dir / "report.csv").string() << "\n";
}

int run(int argc, char** argv) {
  Overrides overrides;
  auto rest = take_overrides(argc, argv, overrides);

  CLI::App app{"Synthetic handwriting augmentation pipeline", "airink"};
  app.require_subcommand(1);
  std::string config_file;
  std::string seed;
  std::string threads;
  app.add_option("--config", config_file, "Config file (section.key = value lines)");
  app.add_option("--seed", seed, "Run seed");
  app.add_option("--threads", threads, "Worker cap");

  auto* ingest = app.add_subcommand("ingest", "Validate the corpus and record its digest");
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic fixture corpus");
  std::size_t fixture_n = 20;
  double separation = 2.0;
  bool force = false;
  fixture->add_option("--n", fixture_n, "Subjects per class")->check(CLI::PositiveNumber);
  fixture->add_option("--separation", separation, "Class separation");
  fixture->add_flag("--force", force, "Replace an existing corpus directory");

  UnitOptions unit;
  auto* train_gen = app.add_subcommand("train-gen", "Train the two class generators of a unit");
  unit.add(train_gen, false);
  auto* generate = app.add_subcommand("generate", "Draw unscreened samples from trained generators");
  unit.add(generate, false);
  std::size_t count = 16;
  generate->add_option("--count", count, "Samples per class");
  auto* screen = app.add_subcommand("screen", "Train the ensemble and screen synthetic samples");
  unit.add(screen, true);
  auto* train_clf = app.add_subcommand("train-clf", "Train and score the classifier of one cell");
  unit.add(train_clf, true);
  auto* evaluate = app.add_subcommand("evaluate", "Run every cell, reusing finished stages");
  auto* report = app.add_subcommand("report", "Assemble the report from finished cells");

  for (auto* cmd : app.get_subcommands({})) cmd->fallthrough();

  std::vector<std::string> reversed(rest.rbegin(), rest.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (!seed.empty()) overrides.emplace_back("run.seed", seed);
  if (!threads.empty()) overrides.emplace_back("run.threads", threads);
  const auto config = load_config(config_file, overrides);

  if (*fixture) {
    if (fs::exists(config.corpus_root) && !fs::is_empty(config.corpus_root)) {
      if (!force) {
        throw StageError(config.corpus_root.string() + " is not empty (pass --force to replace)");
      }
      fs::remove_all(config.corpus_root);
    }
    Corpus corpus;
    for (int task : config.tasks) {
      const auto part = make_fixture_corpus(config.seed, fixture_n, task, separation);
      for (const auto& rec : part.recordings()) corpus.add(rec);
    }
    write_corpus(corpus, config.corpus_root);
    write_corpus_record(config, corpus);
    std::cout << "fixture: " << corpus.subject_count() << " subjects, " << corpus.size()
              << " recordings, digest " << corpus.digest() << "\n";
    return 0;
  }
  if (*ingest) {
    const auto corpus = load_corpus(config.corpus_root);
    write_corpus_record(config, corpus);
    std::cout << "ingest: " << corpus.subject_count(Label::ad) << " AD and "
              << corpus.subject_count(Label::healthy) << " healthy subjects, " << corpus.size()
              << " recordings, digest " << corpus.digest() << "\n";
    return 0;
  }

  auto corpus = load_recorded_corpus(config);
  if (*evaluate) {
    StageStore store(config, std::move(corpus), true);
    print_report(store.evaluate(), config);
    return 0;
  }
  StageStore store(config, std::move(corpus), false);
  if (*report) {
    print_report(store.report(), config);
    return 0;
  }
  const auto key = unit.key(config);
  if (*train_gen) {
    store.train_generators(key);
    std::cout << "train-gen: wrote generators to " << store.unit_dir(key).string() << "\n";
  } else if (*generate) {
    const auto dir = store.generate_samples(key, count);
    std::cout << "generate: wrote " << count << " samples per class to " << dir.string() << "\n";
  } else if (*screen) {
    store.screen(key, unit.budget);
    std::cout << "screen: wrote " << unit.budget << " samples per class to "
              << (store.unit_dir(key) / ("budget" + std::to_string(unit.budget)) / "screened").string()
              << "\n";
  } else if (*train_clf) {
    const auto r = store.train_classifier(key, unit.budget);
    std::cout << "train-clf: accuracy " << format_percent(r.accuracy) << "% on " << r.n_test
              << " test images (best epoch " << r.best_epoch << " of " << r.epochs_run << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "airink: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "airink: IoError: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "airink: " << e.what() << "\n";
    return 1;
  }
}
