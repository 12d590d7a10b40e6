#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "airink/clf.hpp"
#include "airink/cnn.hpp"
#include "airink/generator.hpp"
#include "airink/imaging.hpp"
#include "airink/ink.hpp"

namespace airink {

struct Vote {
  Label decision = Label::healthy;
  int votes_ad = 0;
  int votes_healthy = 0;
};

/// Anything that can classify a synthetic series for screening.
class Screen {
 public:
  virtual ~Screen() = default;
  virtual Vote vote(const AccelSeries& series) const = 0;
};

/// Member decision is AD when its probability reaches 0.5; the ensemble
/// decision is the class with the strict majority of member votes.
Vote majority_vote(std::span<const double> ad_probabilities);

/// Five-member CNN ensemble screening synthetic samples by majority vote.
class Ensemble : public Screen {
 public:
  static constexpr std::size_t kMembers = 5;
  using Member = std::function<double(const GrayImage&)>;

  Ensemble(std::vector<Cnn> models, std::vector<std::uint64_t> member_seeds);
  /// Ensemble over arbitrary member callables returning P(AD).
  static Ensemble from_members(std::vector<Member> members);

  Vote predict(const GrayImage& image) const;
  Vote vote(const AccelSeries& series) const override;

  const std::vector<Cnn>& models() const noexcept { return models_; }
  const std::vector<std::uint64_t>& member_seeds() const noexcept { return seeds_; }
  std::size_t size() const noexcept { return members_.size(); }

 private:
  Ensemble() = default;
  std::vector<Cnn> models_;
  std::vector<std::uint64_t> seeds_;
  std::vector<Member> members_;
};

struct EnsembleTrainingInfo {
  std::vector<std::size_t> train_sizes;
  std::vector<std::size_t> validation_sizes;
  std::vector<std::size_t> best_epochs;
};

/// Member i trains on the first round(0.35 N) images of a shuffle seeded by
/// derive_seed(seed, i) and validates on the next round(0.15 N).
Ensemble train_ensemble(std::span<const LabeledImage> real, const ClfConfig& config,
                        std::uint64_t seed, const CnnArch& arch = {},
                        EnsembleTrainingInfo* info = nullptr);

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& dir);
Ensemble load_ensemble(const std::filesystem::path& dir);

/// Keeps the samples whose ensemble decision equals their label, in order.
std::vector<AccelSeries> filter_synthetic(const Screen& screen, std::span<const AccelSeries> batch);

struct ScreeningRecord {
  std::size_t index = 0;  // attempt index within the class
  Label label = Label::healthy;
  int votes_ad = 0;
  int votes_healthy = 0;
  bool accepted = false;
};

struct ScreenedSet {
  std::vector<AccelSeries> accepted;  // AD samples first, then Healthy
  std::vector<ScreeningRecord> log;
  std::size_t attempts_ad = 0;
  std::size_t attempts_healthy = 0;

  std::size_t attempts(Label label) const { return label == Label::ad ? attempts_ad : attempts_healthy; }
};

/// Alternates between the two class generators, screening draws until each
/// class holds budget_per_class accepted samples. Throws ScreeningStarvation
/// once a class has used 100 x budget attempts.
ScreenedSet generate_screened(const GeneratorModel& first, const GeneratorModel& second,
                              const Screen& screen, std::size_t budget_per_class,
                              std::uint64_t seed, int task_id = 0);

inline constexpr std::size_t kAttemptCapFactor = 100;

/// Accepted samples as `<label>/syn_<label>_<index>/task_NN.csv` recordings
/// (positions obtained by double integration from the origin) plus
/// `manifest.csv`, and the exact values in `series.csv`.
void write_screened_set(const ScreenedSet& set, const std::filesystem::path& dir,
                        MovementMode mode = MovementMode::both);
/// Reads back `series.csv` and `screening_log.csv` from write_screened_set.
ScreenedSet read_screened_set(const std::filesystem::path& dir);

/// Screening log CSV: index,class,votes_ad,votes_healthy,accepted.
void write_screening_log(std::span<const ScreeningRecord> log, const std::filesystem::path& path);

/// Inverse of compute_acceleration with zero initial position and velocity.
/// Samples are pen-up for in-air series and pen-down otherwise.
Recording series_to_recording(const AccelSeries& series, const std::string& subject_id,
                              int task_id, MovementMode mode = MovementMode::both);

}  // namespace airink
