#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "airink/clf.hpp"
#include "airink/cnn.hpp"
#include "airink/config.hpp"
#include "airink/corpus.hpp"
#include "airink/generator.hpp"
#include "airink/judge.hpp"
#include "airink/report.hpp"

namespace airink {

/// One cell of the evaluation matrix.
struct Scenario {
  int task_id = 13;
  MovementMode mode = MovementMode::in_air;
  std::size_t budget = 0;  // accepted synthetic samples per class

  void validate() const;
};

/// A (task, mode, repetition) unit; every budget of a unit shares its split,
/// generators and ensemble. Repetitions are numbered from 1.
struct UnitKey {
  int task_id = 13;
  MovementMode mode = MovementMode::in_air;
  std::size_t rep = 1;
};

// Seed derivation. The split depends only on the repetition, so all modes
// and budgets of a repetition see the same subjects.
std::uint64_t split_seed(std::uint64_t run_seed, std::size_t rep);
std::uint64_t unit_seed(std::uint64_t run_seed, const UnitKey& unit);
std::uint64_t generator_seed(std::uint64_t unit_seed, Label label);
std::uint64_t ensemble_seed(std::uint64_t unit_seed);
std::uint64_t screening_seed(std::uint64_t unit_seed, std::size_t budget);
std::uint64_t classifier_seed(std::uint64_t unit_seed, std::size_t budget);

struct RepetitionData {
  std::vector<AccelSeries> train_series;  // real training subjects only
  std::vector<LabeledImage> train_images;
  std::vector<LabeledImage> test_images;
  /// Recordings with an empty or too-short segment for the mode.
  std::size_t skipped = 0;
};

/// Subject split of one task's recordings and conversion to series/images.
RepetitionData prepare_repetition(const Corpus& task_corpus, MovementMode mode,
                                  double test_fraction, std::uint64_t split_seed);

/// Builds the screen of a unit from its real training data. When empty, the
/// unit trains the CNN ensemble.
using ScreenFactory =
    std::function<std::shared_ptr<const Screen>(const UnitKey&, const RepetitionData&)>;

struct CellResult {
  Scenario scenario;
  std::size_t rep = 1;
  double accuracy = 0.0;  // percent on held-out real subjects
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t n_test = 0;
  std::size_t n_synthetic = 0;
};

/// Validation images come from the real training images only; synthetic
/// images join the training side.
CellResult score_cell(const RepetitionData& data, std::span<const AccelSeries> synthetic,
                      const ClfConfig& config, std::uint64_t seed, const CnnArch& arch = {},
                      std::optional<TrainedClassifier>* trained = nullptr);

/// Trains the (AD, Healthy) generators on the repetition's training series.
std::pair<GeneratorModel, GeneratorModel> train_generator_pair(const RepetitionData& data,
                                                               GeneratorConfig config,
                                                               std::uint64_t unit_seed);

/// All repetitions of a single scenario, trained from scratch in memory.
ReportRow evaluate_scenario(const Corpus& real, const Scenario& scenario,
                            const RunConfig& config, const CnnArch& arch = {},
                            ScreenFactory screen = {});

/// Every requested (task, mode, budget) cell, in memory. Rows follow the
/// config's task, mode and budget order.
AccuracyReport run_matrix(const Corpus& real, const RunConfig& config, const CnnArch& arch = {},
                          ScreenFactory screen = {});

/// Runs body(0..n-1) on at most `threads` workers. The exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Hash of everything that determines stage outputs.
std::string run_fingerprint(const RunConfig& config, const Corpus& real);

/// Pipeline stages backed by files under `<output_dir>/stages`.
///
///   task<NN>/<mode>/rep<r>/stage.json            fingerprint of config + corpus
///   task<NN>/<mode>/rep<r>/gen_<class>.ckpt      generator (+ .meta.json)
///   task<NN>/<mode>/rep<r>/samples/               unscreened draws
///   task<NN>/<mode>/rep<r>/ensemble/              only with run.save_ensembles
///   task<NN>/<mode>/rep<r>/budget<B>/screened/    accepted synthetic set
///   task<NN>/<mode>/rep<r>/budget<B>/result.json  classifier score
///
/// Existing artifacts with a matching fingerprint are reused; a unit whose
/// fingerprint differs is cleared first.
class StageStore {
 public:
  /// With `compute_upstream` false a stage whose input is missing throws
  /// StageError instead of producing it.
  StageStore(RunConfig config, Corpus real, bool compute_upstream, CnnArch arch = {},
             ScreenFactory screen = {});

  const RunConfig& config() const noexcept { return config_; }
  std::filesystem::path unit_dir(const UnitKey& unit) const;
  std::filesystem::path result_path(const UnitKey& unit, std::size_t budget) const;

  void train_generators(const UnitKey& unit);
  std::filesystem::path generate_samples(const UnitKey& unit, std::size_t per_class);
  void screen(const UnitKey& unit, std::size_t budget);
  CellResult train_classifier(const UnitKey& unit, std::size_t budget);

  /// Every cell of the config (parallel over units), then the report files
  /// and the run manifest.
  AccuracyReport evaluate();
  /// Report from existing results only; writes report files and manifest.
  AccuracyReport report() const;

  std::vector<UnitKey> units() const;

 private:
  void prepare_unit_dir(const UnitKey& unit) const;
  void write_outputs(const AccuracyReport& report) const;

  RunConfig config_;
  Corpus real_;
  bool compute_upstream_;
  CnnArch arch_;
  ScreenFactory screen_;
  std::string fingerprint_;
};

/// `<output_dir>/corpus.json`, written by the ingest and fixture stages.
std::filesystem::path corpus_record_path(const RunConfig& config);
void write_corpus_record(const RunConfig& config, const Corpus& corpus);
/// Loads the corpus and checks it against corpus.json; StageError when the
/// record is missing or the corpus changed since it was written.
Corpus load_recorded_corpus(const RunConfig& config);

void write_result(const CellResult& result, const std::filesystem::path& path);
CellResult read_result(const std::filesystem::path& path);

}  // namespace airink
