#include "airink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "airink/checkpoint.hpp"
#include "airink/error.hpp"
#include "airink/rng.hpp"
#include "text.hpp"

namespace airink {
namespace fs = std::filesystem;
using json = nlohmann::json;

void Scenario::validate() const {
  if (std::find(std::begin(kStudiedTasks), std::end(kStudiedTasks), task_id) ==
      std::end(kStudiedTasks)) {
    throw InvalidArgument("scenario task must be 13 or 16, got " + std::to_string(task_id));
  }
}

std::uint64_t split_seed(std::uint64_t run_seed, std::size_t rep) {
  return derive_seed(derive_seed(run_seed, "split"), rep);
}

std::uint64_t unit_seed(std::uint64_t run_seed, const UnitKey& unit) {
  auto s = derive_seed(run_seed, "unit");
  s = derive_seed(s, static_cast<std::uint64_t>(unit.task_id));
  s = derive_seed(s, mode_name(unit.mode));
  return derive_seed(s, unit.rep);
}

std::uint64_t generator_seed(std::uint64_t unit, Label label) {
  return derive_seed(unit, "generator/" + std::string(label_name(label)));
}

std::uint64_t ensemble_seed(std::uint64_t unit) { return derive_seed(unit, "ensemble"); }

std::uint64_t screening_seed(std::uint64_t unit, std::size_t budget) {
  return derive_seed(derive_seed(unit, "screen"), budget);
}

std::uint64_t classifier_seed(std::uint64_t unit, std::size_t budget) {
  return derive_seed(derive_seed(unit, "classifier"), budget);
}

RepetitionData prepare_repetition(const Corpus& task_corpus, MovementMode mode,
                                  double test_fraction, std::uint64_t seed) {
  const auto [train, test] = subject_split(task_corpus, test_fraction, seed);
  RepetitionData data;
  auto convert = [&](const Corpus& part, bool training) {
    for (const auto& rec : part.recordings()) {
      AccelSeries series;
      try {
        series = recording_to_series(rec, mode);
      } catch (const EmptySegment&) {
        ++data.skipped;
        continue;
      } catch (const TooShort&) {
        ++data.skipped;
        continue;
      }
      LabeledImage image{series_to_image(series), series.label};
      if (training) {
        data.train_images.push_back(std::move(image));
        data.train_series.push_back(std::move(series));
      } else {
        data.test_images.push_back(std::move(image));
      }
    }
  };
  convert(train, true);
  convert(test, false);
  if (data.test_images.empty()) throw DegenerateSplit("no usable test recordings");
  return data;
}

CellResult score_cell(const RepetitionData& data, std::span<const AccelSeries> synthetic,
                      const ClfConfig& config, std::uint64_t seed, const CnnArch& arch,
                      std::optional<TrainedClassifier>* trained) {
  auto [train, validation] =
      split_for_validation(data.train_images, config, derive_seed(seed, "validation"));
  for (const auto& s : synthetic) train.push_back({series_to_image(s), s.label});
  auto model = train_classifier(train, validation, config, seed, arch);
  CellResult r;
  r.accuracy = accuracy_percent(model.model, data.test_images);
  r.best_epoch = model.best_epoch;
  r.epochs_run = model.epochs_run;
  r.n_train = train.size();
  r.n_validation = validation.size();
  r.n_test = data.test_images.size();
  r.n_synthetic = synthetic.size();
  if (trained) trained->emplace(std::move(model));
  return r;
}

std::pair<GeneratorModel, GeneratorModel> train_generator_pair(const RepetitionData& data,
                                                               GeneratorConfig config,
                                                               std::uint64_t unit) {
  auto train = [&](Label label) {
    std::vector<AccelSeries> series;
    for (const auto& s : data.train_series) {
      if (s.label == label) series.push_back(s);
    }
    auto cfg = config;
    cfg.seed = generator_seed(unit, label);
    return train_generator(series, cfg);
  };
  auto ad = train(Label::ad);
  auto healthy = train(Label::healthy);
  return {std::move(ad), std::move(healthy)};
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min(std::max<std::size_t>(threads, 1), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

// Everything one (task, mode, repetition) unit needs, computed lazily and
// optionally mirrored on disk.
class UnitRunner {
 public:
  UnitRunner(const RunConfig& config, const Corpus& task_corpus, const UnitKey& key,
             const CnnArch& arch, const ScreenFactory& screen, std::optional<fs::path> dir,
             bool compute_upstream)
      : config_(config),
        corpus_(task_corpus),
        key_(key),
        arch_(arch),
        screen_factory_(screen),
        dir_(std::move(dir)),
        compute_(compute_upstream),
        seed_(unit_seed(config.seed, key)) {}

  const RepetitionData& data() {
    if (!data_) {
      data_ = prepare_repetition(corpus_, key_.mode, config_.test_fraction,
                                 split_seed(config_.seed, key_.rep));
    }
    return *data_;
  }

  fs::path generator_path(Label label) const {
    return *dir_ / ("gen_" + std::string(label_name(label)) + ".ckpt");
  }
  fs::path budget_dir(std::size_t budget) const {
    return *dir_ / ("budget" + std::to_string(budget));
  }
  fs::path screened_dir(std::size_t budget) const { return budget_dir(budget) / "screened"; }

  std::map<std::string, std::string> context() const {
    return {{"task", std::to_string(key_.task_id)},
            {"mode", std::string(mode_name(key_.mode))},
            {"rep", std::to_string(key_.rep)},
            {"run_seed", std::to_string(config_.seed)}};
  }

  void ensure_generators() {
    if (generators_) return;
    if (dir_ && fs::exists(generator_path(Label::ad)) && fs::exists(generator_path(Label::healthy))) {
      generators_.emplace(load_generator(generator_path(Label::ad)),
                          load_generator(generator_path(Label::healthy)));
      return;
    }
    if (!compute_) {
      throw StageError("missing " + generator_path(Label::ad).string() + " (run train-gen first)");
    }
    generators_.emplace(train_generator_pair(data(), config_.generator, seed_));
    if (dir_) {
      save_generator(generators_->first, generator_path(Label::ad), context());
      save_generator(generators_->second, generator_path(Label::healthy), context());
    }
  }

  const std::pair<GeneratorModel, GeneratorModel>& generators() {
    ensure_generators();
    return *generators_;
  }

  // Deterministic, so a run that retrains it sees the same members.
  const Ensemble& ensemble() {
    if (ensemble_) return *ensemble_;
    const auto dir = dir_ ? std::optional<fs::path>(*dir_ / "ensemble") : std::nullopt;
    if (dir && fs::exists(*dir / "member0.ckpt")) {
      ensemble_.emplace(load_ensemble(*dir));
      return *ensemble_;
    }
    ensemble_.emplace(train_ensemble(data().train_images, config_.clf, ensemble_seed(seed_), arch_));
    if (dir && config_.save_ensembles) save_ensemble(*ensemble_, *dir);
    return *ensemble_;
  }

  const Screen& screen() {
    if (!screen_factory_) return ensemble();
    if (!screen_) screen_ = screen_factory_(key_, data());
    return *screen_;
  }

  const ScreenedSet& screened(std::size_t budget) {
    if (auto it = screened_.find(budget); it != screened_.end()) return it->second;
    const auto dir = dir_ ? std::optional<fs::path>(screened_dir(budget)) : std::nullopt;
    if (dir && fs::exists(*dir / "series.csv")) {
      return screened_.emplace(budget, read_screened_set(*dir)).first->second;
    }
    if (!compute_ && !(fs::exists(generator_path(Label::ad)))) {
      throw StageError("missing " + generator_path(Label::ad).string() + " (run train-gen first)");
    }
    const auto& [ad, healthy] = generators();
    auto set = generate_screened(ad, healthy, screen(), budget, screening_seed(seed_, budget),
                                 key_.task_id);
    if (dir) write_screened_set(set, *dir, key_.mode);
    return screened_.emplace(budget, std::move(set)).first->second;
  }

  // Only the screen stage may produce a screened set; train-clf requires it.
  CellResult cell(std::size_t budget, bool compute_screened) {
    const auto result_file = dir_ ? budget_dir(budget) / "result.json" : fs::path();
    if (dir_ && fs::exists(result_file)) return read_result(result_file);
    std::vector<AccelSeries> synthetic;
    if (budget > 0) {
      if (!compute_screened && !fs::exists(screened_dir(budget) / "series.csv")) {
        throw StageError("missing " + (screened_dir(budget) / "series.csv").string() +
                         " (run screen first)");
      }
      synthetic = screened(budget).accepted;
    }
    std::optional<TrainedClassifier> trained;
    auto result = score_cell(data(), synthetic, config_.clf, classifier_seed(seed_, budget), arch_,
                             config_.save_classifiers && dir_ ? &trained : nullptr);
    result.scenario = {key_.task_id, key_.mode, budget};
    result.rep = key_.rep;
    if (dir_) {
      fs::create_directories(budget_dir(budget));
      if (config_.save_classifiers) {
        Checkpoint ckpt;
        ckpt.parameters = trained->model.parameters();
        ckpt.metadata = context();
        ckpt.metadata["model"] = "cnn";
        ckpt.metadata["budget"] = std::to_string(budget);
        ckpt.metadata["best_epoch"] = std::to_string(trained->best_epoch);
        save_checkpoint(budget_dir(budget) / "classifier.ckpt", ckpt);
      }
      write_result(result, result_file);
    }
    return result;
  }

  fs::path samples(std::size_t per_class) {
    const auto& [ad, healthy] = generators();
    ScreenedSet set;
    for (const auto* model : {&ad, &healthy}) {
      const auto label = model->class_label();
      const auto base = derive_seed(derive_seed(seed_, "samples"), label_name(label));
      std::vector<std::uint64_t> seeds(per_class);
      for (std::size_t i = 0; i < per_class; ++i) seeds[i] = derive_seed(base, i);
      auto draws = model->sample(seeds);
      for (std::size_t i = 0; i < draws.size(); ++i) {
        draws[i].label = label;
        draws[i].source = {"gen_" + std::string(label_name(label)) + "_" + std::to_string(i),
                           key_.task_id};
        set.accepted.push_back(std::move(draws[i]));
      }
    }
    const auto out = *dir_ / "samples";
    fs::remove_all(out);
    write_screened_set(set, out, key_.mode);
    return out;
  }

 private:
  const RunConfig& config_;
  const Corpus& corpus_;
  UnitKey key_;
  CnnArch arch_;
  const ScreenFactory& screen_factory_;
  std::optional<fs::path> dir_;
  bool compute_;
  std::uint64_t seed_;
  std::optional<RepetitionData> data_;
  std::optional<std::pair<GeneratorModel, GeneratorModel>> generators_;
  std::optional<Ensemble> ensemble_;
  std::shared_ptr<const Screen> screen_;
  std::map<std::size_t, ScreenedSet> screened_;
};

std::vector<UnitKey> units_of(const RunConfig& config) {
  std::vector<UnitKey> out;
  for (int task : config.tasks) {
    for (auto mode : config.modes) {
      for (std::size_t rep = 1; rep <= config.repetitions(); ++rep) out.push_back({task, mode, rep});
    }
  }
  return out;
}

// Runs every unit and assembles rows in config order.
AccuracyReport assemble(const RunConfig& config,
                        const std::function<CellResult(const UnitKey&, std::size_t)>& cell,
                        const std::function<void(const UnitKey&)>& run_unit) {
  const auto units = units_of(config);
  parallel_for(units.size(), config.threads, [&](std::size_t i) { run_unit(units[i]); });
  AccuracyReport report;
  for (int task : config.tasks) {
    for (auto mode : config.modes) {
      for (auto budget : config.budgets) {
        ReportRow row{task, mode, budget, {}};
        for (std::size_t rep = 1; rep <= config.repetitions(); ++rep) {
          row.accuracies.push_back(cell({task, mode, rep}, budget).accuracy);
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace

ReportRow evaluate_scenario(const Corpus& real, const Scenario& scenario, const RunConfig& config,
                            const CnnArch& arch, ScreenFactory screen) {
  scenario.validate();
  const auto task_corpus = real.with_task(scenario.task_id);
  if (task_corpus.empty()) {
    throw InvalidArgument("corpus has no recordings for task " + std::to_string(scenario.task_id));
  }
  ReportRow row{scenario.task_id, scenario.mode, scenario.budget, {}};
  for (std::size_t rep = 1; rep <= config.repetitions(); ++rep) {
    UnitRunner unit(config, task_corpus, {scenario.task_id, scenario.mode, rep}, arch, screen,
                    std::nullopt, true);
    row.accuracies.push_back(unit.cell(scenario.budget, true).accuracy);
  }
  return row;
}

AccuracyReport run_matrix(const Corpus& real, const RunConfig& config, const CnnArch& arch,
                          ScreenFactory screen) {
  std::map<int, Corpus> by_task;
  for (int task : config.tasks) {
    Scenario{task, MovementMode::both, 0}.validate();
    by_task[task] = real.with_task(task);
    if (by_task[task].empty()) {
      throw InvalidArgument("corpus has no recordings for task " + std::to_string(task));
    }
  }
  std::mutex mutex;
  std::map<std::tuple<int, MovementMode, std::size_t, std::size_t>, CellResult> results;
  auto run_unit = [&](const UnitKey& key) {
    UnitRunner unit(config, by_task.at(key.task_id), key, arch, screen, std::nullopt, true);
    for (auto budget : config.budgets) {
      auto r = unit.cell(budget, true);
      std::lock_guard lock(mutex);
      results[{key.task_id, key.mode, key.rep, budget}] = r;
    }
  };
  auto cell = [&](const UnitKey& key, std::size_t budget) {
    return results.at({key.task_id, key.mode, key.rep, budget});
  };
  auto report = assemble(config, cell, run_unit);
  report.metadata["seed"] = std::to_string(config.seed);
  report.metadata["corpus_digest"] = real.digest();
  return report;
}

std::string run_fingerprint(const RunConfig& config, const Corpus& real) {
  std::string canonical = "corpus=" + real.digest() + "\n";
  for (const auto& [k, v] : config.to_map()) {
    // Settings that select cells or place files do not change any cell.
    if (k == "run.corpus_root" || k == "run.output_dir" || k == "run.tasks" || k == "run.modes" ||
        k == "run.budgets" || k == "run.threads" || k == "run.save_ensembles" ||
        k == "run.save_classifiers") {
      continue;
    }
    canonical += k + "=" + v + "\n";
  }
  return hex64(derive_seed(0, canonical));
}

StageStore::StageStore(RunConfig config, Corpus real, bool compute_upstream, CnnArch arch,
                       ScreenFactory screen)
    : config_(std::move(config)),
      real_(std::move(real)),
      compute_upstream_(compute_upstream),
      arch_(arch),
      screen_(std::move(screen)),
      fingerprint_(run_fingerprint(config_, real_)) {
  for (int task : config_.tasks) Scenario{task, MovementMode::both, 0}.validate();
}

std::vector<UnitKey> StageStore::units() const { return units_of(config_); }

fs::path StageStore::unit_dir(const UnitKey& unit) const {
  std::ostringstream task;
  task << "task" << (unit.task_id < 10 ? "0" : "") << unit.task_id;
  return config_.output_dir / "stages" / task.str() / std::string(mode_name(unit.mode)) /
         ("rep" + std::to_string(unit.rep));
}

fs::path StageStore::result_path(const UnitKey& unit, std::size_t budget) const {
  return unit_dir(unit) / ("budget" + std::to_string(budget)) / "result.json";
}

void StageStore::prepare_unit_dir(const UnitKey& unit) const {
  const auto dir = unit_dir(unit);
  const auto stamp = dir / "stage.json";
  if (fs::exists(stamp)) {
    std::ifstream in(stamp);
    json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.value("fingerprint", "") == fingerprint_) return;
  }
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream out(stamp, std::ios::binary | std::ios::trunc);
  out << json{{"fingerprint", fingerprint_}}.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + stamp.string());
}

void StageStore::train_generators(const UnitKey& unit) {
  prepare_unit_dir(unit);
  const auto task_corpus = real_.with_task(unit.task_id);
  UnitRunner(config_, task_corpus, unit, arch_, screen_, unit_dir(unit), true).generators();
}

fs::path StageStore::generate_samples(const UnitKey& unit, std::size_t per_class) {
  prepare_unit_dir(unit);
  const auto task_corpus = real_.with_task(unit.task_id);
  return UnitRunner(config_, task_corpus, unit, arch_, screen_, unit_dir(unit), compute_upstream_)
      .samples(per_class);
}

void StageStore::screen(const UnitKey& unit, std::size_t budget) {
  if (budget == 0) throw InvalidArgument("budget 0 has no screened set");
  prepare_unit_dir(unit);
  const auto task_corpus = real_.with_task(unit.task_id);
  UnitRunner(config_, task_corpus, unit, arch_, screen_, unit_dir(unit), compute_upstream_)
      .screened(budget);
}

CellResult StageStore::train_classifier(const UnitKey& unit, std::size_t budget) {
  prepare_unit_dir(unit);
  const auto task_corpus = real_.with_task(unit.task_id);
  return UnitRunner(config_, task_corpus, unit, arch_, screen_, unit_dir(unit), compute_upstream_)
      .cell(budget, compute_upstream_);
}

AccuracyReport StageStore::evaluate() {
  std::map<int, Corpus> by_task;
  for (int task : config_.tasks) {
    by_task[task] = real_.with_task(task);
    if (by_task[task].empty()) {
      throw InvalidArgument("corpus has no recordings for task " + std::to_string(task));
    }
  }
  auto run_unit = [&](const UnitKey& key) {
    prepare_unit_dir(key);
    UnitRunner unit(config_, by_task.at(key.task_id), key, arch_, screen_, unit_dir(key), true);
    for (auto budget : config_.budgets) unit.cell(budget, true);
  };
  auto cell = [&](const UnitKey& key, std::size_t budget) {
    return read_result(result_path(key, budget));
  };
  auto report = assemble(config_, cell, run_unit);
  report.metadata["seed"] = std::to_string(config_.seed);
  report.metadata["corpus_digest"] = real_.digest();
  write_outputs(report);
  return report;
}

AccuracyReport StageStore::report() const {
  AccuracyReport report;
  for (int task : config_.tasks) {
    for (auto mode : config_.modes) {
      for (auto budget : config_.budgets) {
        ReportRow row{task, mode, budget, {}};
        for (std::size_t rep = 1; rep <= config_.repetitions(); ++rep) {
          const UnitKey key{task, mode, rep};
          const auto path = result_path(key, budget);
          std::ifstream in(unit_dir(key) / "stage.json");
          json stamp = json::parse(in, nullptr, false);
          if (!fs::exists(path) || stamp.is_discarded() ||
              stamp.value("fingerprint", "") != fingerprint_) {
            throw StageError("missing " + path.string() + " (run train-clf or evaluate first)");
          }
          row.accuracies.push_back(read_result(path).accuracy);
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  report.metadata["seed"] = std::to_string(config_.seed);
  report.metadata["corpus_digest"] = real_.digest();
  write_outputs(report);
  return report;
}

void StageStore::write_outputs(const AccuracyReport& report) const {
  fs::create_directories(config_.output_dir);
  emit_report(report, config_.output_dir / "report.csv");

  json seeds = json::object();
  for (const auto& unit : units()) {
    const auto u = unit_seed(config_.seed, unit);
    json s{{"split", split_seed(config_.seed, unit.rep)},
           {"generator_ad", generator_seed(u, Label::ad)},
           {"generator_healthy", generator_seed(u, Label::healthy)},
           {"ensemble", ensemble_seed(u)}};
    for (auto b : config_.budgets) {
      s["classifier_budget" + std::to_string(b)] = classifier_seed(u, b);
      if (b > 0) s["screening_budget" + std::to_string(b)] = screening_seed(u, b);
    }
    seeds[unit_dir(unit).lexically_relative(config_.output_dir).generic_string()] = s;
  }
  json manifest{{"format", "airink-run"},
                {"version", 1},
                {"config", config_.to_map()},
                {"fingerprint", fingerprint_},
                {"corpus_digest", real_.digest()},
                {"artifacts",
                 {{"checkpoint", "AIRINKCK/1"}, {"report", "csv/1"}, {"screened_set", "csv/1"}}},
                {"seeds", seeds}};
  const auto path = config_.output_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

fs::path corpus_record_path(const RunConfig& config) { return config.output_dir / "corpus.json"; }

void write_corpus_record(const RunConfig& config, const Corpus& corpus) {
  fs::create_directories(config.output_dir);
  const auto tasks = corpus.tasks();
  json j{{"root", config.corpus_root.string()},
         {"digest", corpus.digest()},
         {"recordings", corpus.size()},
         {"subjects_ad", corpus.subject_count(Label::ad)},
         {"subjects_healthy", corpus.subject_count(Label::healthy)},
         {"tasks", std::vector<int>(tasks.begin(), tasks.end())}};
  const auto path = corpus_record_path(config);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

Corpus load_recorded_corpus(const RunConfig& config) {
  const auto record = corpus_record_path(config);
  if (!fs::exists(record)) {
    throw StageError("missing " + record.string() + " (run ingest or fixture first)");
  }
  std::ifstream in(record);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("digest")) throw ParseError("malformed " + record.string());
  auto corpus = load_corpus(config.corpus_root);
  if (corpus.digest() != j["digest"].get<std::string>()) {
    throw StageError("corpus under " + config.corpus_root.string() +
                     " changed since it was ingested (run ingest again)");
  }
  return corpus;
}

void write_result(const CellResult& r, const fs::path& path) {
  json j{{"task", r.scenario.task_id},
         {"mode", std::string(mode_name(r.scenario.mode))},
         {"budget", r.scenario.budget},
         {"rep", r.rep},
         // Text keeps the exact double through the round trip.
         {"accuracy", text::format_double(r.accuracy)},
         {"best_epoch", r.best_epoch},
         {"epochs_run", r.epochs_run},
         {"n_train", r.n_train},
         {"n_validation", r.n_validation},
         {"n_test", r.n_test},
         {"n_synthetic", r.n_synthetic}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

CellResult read_result(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw StageError("missing " + path.string());
  json j = json::parse(in, nullptr, false);
  CellResult r;
  try {
    r.scenario = {j.at("task").get<int>(), parse_mode(j.at("mode").get<std::string>()),
                  j.at("budget").get<std::size_t>()};
    r.rep = j.at("rep").get<std::size_t>();
    if (!text::parse_double(j.at("accuracy").get<std::string>(), r.accuracy)) {
      throw ParseError("bad accuracy");
    }
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.epochs_run = j.at("epochs_run").get<std::size_t>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_validation = j.at("n_validation").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.n_synthetic = j.at("n_synthetic").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError("malformed " + path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace airink
