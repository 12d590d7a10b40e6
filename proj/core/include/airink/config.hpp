#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "airink/clf.hpp"
#include "airink/generator.hpp"
#include "airink/ink.hpp"

namespace airink {

/// Tasks the evaluation harness accepts.
inline constexpr int kStudiedTasks[] = {13, 16};

struct RunConfig {
  std::filesystem::path corpus_root;
  std::filesystem::path output_dir = "airink_out";
  std::vector<int> tasks{13, 16};
  std::vector<MovementMode> modes{MovementMode::in_air, MovementMode::on_paper, MovementMode::both};
  std::vector<std::size_t> budgets{0, 500, 1000};
  std::uint64_t seed = 0;
  double test_fraction = 0.5;
  std::size_t threads = 1;
  bool save_ensembles = false;
  bool save_classifiers = false;

  GeneratorConfig generator;
  // clf.folds is the number of repeated train/test splits per scenario.
  ClfConfig clf;

  std::size_t repetitions() const noexcept { return clf.folds; }

  /// Every resolved setting as `section.key` -> value.
  std::map<std::string, std::string> to_map() const;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `section.key = value` lines (`#` starts a comment), then applies
/// the overrides in order. Throws ConfigError naming the key for unknown
/// keys, bad values and a missing run.corpus_root.
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});

/// parse_config on a file; an empty path means no file.
RunConfig load_config(const std::filesystem::path& file, const Overrides& overrides = {});

/// The resolved config in the file format, keys sorted.
std::string render_config(const RunConfig& config);

}  // namespace airink
