#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "airink/ink.hpp"

namespace airink {

/// A set of recordings, at most one per (subject, task), with a subject
/// index. Every subject carries a single class label.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Recording> recordings);

  /// Validates the recording and the uniqueness/label invariants.
  void add(Recording rec);

  const std::vector<Recording>& recordings() const noexcept { return recordings_; }
  std::size_t size() const noexcept { return recordings_.size(); }
  bool empty() const noexcept { return recordings_.empty(); }

  /// Subject ids in lexicographic order.
  std::vector<std::string> subjects() const;
  std::vector<std::string> subjects(Label label) const;
  std::size_t subject_count() const noexcept { return index_.size(); }
  std::size_t subject_count(Label label) const;
  Label subject_label(const std::string& subject_id) const;
  const std::vector<std::size_t>& positions(const std::string& subject_id) const;
  std::set<int> tasks() const;

  Corpus with_task(int task_id) const;
  Corpus with_subjects(const std::set<std::string>& subject_ids) const;

  /// Stable 64-bit content digest (hex), used in run manifests.
  std::string digest() const;

 private:
  std::vector<Recording> recordings_;
  std::map<std::string, std::vector<std::size_t>> index_;
  std::map<std::string, Label> labels_;
};

/// Per-recording CSV: header `t,x,y,pen_down,pressure`, one sample per row.
Recording parse_recording(std::istream& in, std::string subject_id, int task_id, Label label);
Recording parse_recording(std::string_view text, std::string subject_id, int task_id,
                          Label label);
std::string serialize_recording(const Recording& rec);

/// Relative path of a recording inside a corpus root:
/// `<label>/<subject_id>/task_<NN>.csv`.
std::filesystem::path recording_path(const Recording& rec);

/// Loads `<root>/<label>/<subject_id>/task_<NN>.csv` files. Files that fail to
/// parse are collected into a single ParseError listing each of them.
Corpus load_corpus(const std::filesystem::path& root);

/// Writes every recording in the directory layout plus `manifest.csv`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

/// `manifest.csv` with columns subject_id,label,task_id,path.
void write_manifest(const Corpus& corpus, const std::filesystem::path& path);

/// Deterministic sinusoid-plus-noise pen traces. AD subjects get noise
/// amplitude and in-air run lengths scaled by (1 + separation).
Corpus make_fixture_corpus(std::uint64_t seed, std::size_t n_per_class, int task_id,
                           double separation);

struct SubjectPartition {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Class-stratified subject split; the test side has floor(fraction * n)
/// subjects.
SubjectPartition subject_split_ids(const Corpus& corpus, double test_fraction,
                                   std::uint64_t seed);
std::pair<Corpus, Corpus> subject_split(const Corpus& corpus, double test_fraction,
                                        std::uint64_t seed);

/// Class-stratified subject folds; returns (train, validation) pairs.
std::vector<SubjectPartition> k_fold_ids(const Corpus& corpus, std::size_t n_folds,
                                         std::uint64_t seed);
std::vector<std::pair<Corpus, Corpus>> k_folds(const Corpus& corpus, std::size_t n_folds,
                                               std::uint64_t seed);

}  // namespace airink
