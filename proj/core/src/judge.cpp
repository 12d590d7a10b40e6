#include "airink/judge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "airink/checkpoint.hpp"
#include "airink/corpus.hpp"
#include "airink/error.hpp"
#include "airink/rng.hpp"
#include "text.hpp"

namespace airink {
namespace fs = std::filesystem;

Vote majority_vote(std::span<const double> ad_probabilities) {
  Vote v;
  for (double p : ad_probabilities) (p >= 0.5 ? v.votes_ad : v.votes_healthy) += 1;
  v.decision = v.votes_ad > v.votes_healthy ? Label::ad : Label::healthy;
  return v;
}

Ensemble::Ensemble(std::vector<Cnn> models, std::vector<std::uint64_t> member_seeds)
    : models_(std::move(models)), seeds_(std::move(member_seeds)) {
  if (models_.size() != kMembers || seeds_.size() != kMembers) {
    throw InvalidArgument("an ensemble has exactly 5 members");
  }
  for (const auto& m : models_) {
    members_.push_back([&m](const GrayImage& img) { return m.probability(img); });
  }
}

Ensemble Ensemble::from_members(std::vector<Member> members) {
  if (members.size() != kMembers) throw InvalidArgument("an ensemble has exactly 5 members");
  Ensemble e;
  e.members_ = std::move(members);
  return e;
}

Vote Ensemble::predict(const GrayImage& image) const {
  std::array<double, kMembers> p{};
  for (std::size_t i = 0; i < members_.size(); ++i) p[i] = members_[i](image);
  return majority_vote(p);
}

Vote Ensemble::vote(const AccelSeries& series) const { return predict(series_to_image(series)); }

Ensemble train_ensemble(std::span<const LabeledImage> real, const ClfConfig& config,
                        std::uint64_t seed, const CnnArch& arch, EnsembleTrainingInfo* info) {
  bool ad = false;
  bool healthy = false;
  for (const auto& im : real) (im.label == Label::ad ? ad : healthy) = true;
  if (!ad || !healthy) throw LabelError("ensemble training data holds a single class");

  const auto n = real.size();
  const auto n_train = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::lround(config.train_fraction * static_cast<double>(n))));
  const auto n_val = std::min(
      n - std::min(n, n_train),
      static_cast<std::size_t>(std::lround(config.validation_fraction * static_cast<double>(n))));

  std::vector<Cnn> models;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < Ensemble::kMembers; ++i) {
    const auto member_seed = derive_seed(seed, i);
    std::vector<std::size_t> order(n);
    std::vector<LabeledImage> train, validation;
    // Reshuffle (deterministically) until the member's subset holds both
    // classes; small pools can otherwise draw a single class.
    for (std::uint64_t attempt = 0;; ++attempt) {
      for (std::size_t k = 0; k < n; ++k) order[k] = k;
      RandomStream rng(derive_seed(member_seed, attempt));
      shuffle(order.begin(), order.end(), rng);
      train.clear();
      validation.clear();
      for (std::size_t k = 0; k < std::min(n, n_train); ++k) train.push_back(real[order[k]]);
      for (std::size_t k = n_train; k < std::min(n, n_train + n_val); ++k) {
        validation.push_back(real[order[k]]);
      }
      const bool mixed = std::any_of(train.begin(), train.end(),
                                     [](const auto& im) { return im.label == Label::ad; }) &&
                         std::any_of(train.begin(), train.end(),
                                     [](const auto& im) { return im.label == Label::healthy; });
      if (mixed) break;
      if (attempt > 1000) throw LabelError("cannot draw a two-class ensemble subset");
    }
    auto trained = train_classifier(train, validation, config, member_seed, arch);
    if (info) {
      info->train_sizes.push_back(train.size());
      info->validation_sizes.push_back(validation.size());
      info->best_epochs.push_back(trained.best_epoch);
    }
    models.push_back(std::move(trained.model));
    seeds.push_back(member_seed);
  }
  return Ensemble(std::move(models), std::move(seeds));
}

void save_ensemble(const Ensemble& ensemble, const fs::path& dir) {
  if (ensemble.models().size() != Ensemble::kMembers) {
    throw InvalidArgument("only trained CNN ensembles can be saved");
  }
  fs::create_directories(dir);
  for (std::size_t i = 0; i < Ensemble::kMembers; ++i) {
    const auto& m = ensemble.models()[i];
    Checkpoint ckpt;
    ckpt.parameters = m.parameters();
    ckpt.metadata["model"] = "cnn";
    ckpt.metadata["member_seed"] = std::to_string(ensemble.member_seeds()[i]);
    ckpt.metadata["input_side"] = std::to_string(m.arch().input_side);
    ckpt.metadata["dense_units"] = std::to_string(m.arch().dense_units);
    for (std::size_t f = 0; f < 5; ++f) {
      ckpt.metadata["filters" + std::to_string(f)] = std::to_string(m.arch().filters[f]);
    }
    save_checkpoint(dir / ("member" + std::to_string(i) + ".ckpt"), ckpt);
  }
}

Ensemble load_ensemble(const fs::path& dir) {
  std::vector<Cnn> models;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < Ensemble::kMembers; ++i) {
    auto ckpt = load_checkpoint(dir / ("member" + std::to_string(i) + ".ckpt"));
    CnnArch arch;
    arch.input_side = std::stoi(ckpt.metadata.at("input_side"));
    arch.dense_units = std::stoi(ckpt.metadata.at("dense_units"));
    for (std::size_t f = 0; f < 5; ++f) {
      arch.filters[f] = std::stoi(ckpt.metadata.at("filters" + std::to_string(f)));
    }
    seeds.push_back(std::stoull(ckpt.metadata.at("member_seed")));
    models.emplace_back(arch, std::move(ckpt.parameters));
  }
  return Ensemble(std::move(models), std::move(seeds));
}

std::vector<AccelSeries> filter_synthetic(const Screen& screen, std::span<const AccelSeries> batch) {
  std::vector<AccelSeries> kept;
  for (const auto& s : batch) {
    if (screen.vote(s).decision == s.label) kept.push_back(s);
  }
  return kept;
}

ScreenedSet generate_screened(const GeneratorModel& first, const GeneratorModel& second,
                              const Screen& screen, std::size_t budget, std::uint64_t seed,
                              int task_id) {
  if (budget < 1) throw InvalidArgument("screening budget must be at least 1");
  if (first.class_label() == second.class_label()) {
    throw LabelError("screening needs one generator per class");
  }
  const GeneratorModel& ad = first.class_label() == Label::ad ? first : second;
  const GeneratorModel& healthy = first.class_label() == Label::ad ? second : first;

  constexpr std::size_t kChunk = 16;
  const std::size_t cap = kAttemptCapFactor * budget;

  struct ClassState {
    const GeneratorModel* model;
    Label label;
    std::vector<AccelSeries> accepted;
    std::size_t attempts = 0;
  };
  std::array<ClassState, 2> classes{{{&ad, Label::ad, {}, 0}, {&healthy, Label::healthy, {}, 0}}};

  ScreenedSet out;
  auto done = [&](const ClassState& c) { return c.accepted.size() >= budget; };
  while (!done(classes[0]) || !done(classes[1])) {
    for (auto& c : classes) {
      if (done(c)) continue;
      if (c.attempts >= cap) {
        std::ostringstream msg;
        msg << "class " << label_name(c.label) << " reached the cap of " << cap
            << " attempts; acceptance rates:";
        for (const auto& d : classes) {
          msg << ' ' << label_name(d.label) << '='
              << (d.attempts ? static_cast<double>(d.accepted.size()) / d.attempts : 0.0) << " ("
              << d.accepted.size() << '/' << d.attempts << ')';
        }
        throw ScreeningStarvation(msg.str());
      }
      const auto n = std::min({kChunk, budget - c.accepted.size(), cap - c.attempts});
      std::vector<std::uint64_t> seeds(n);
      const auto class_seed = derive_seed(seed, label_name(c.label));
      for (std::size_t k = 0; k < n; ++k) seeds[k] = derive_seed(class_seed, c.attempts + k);
      auto draws = c.model->sample(seeds);
      for (std::size_t k = 0; k < n; ++k) {
        auto& s = draws[k];
        s.label = c.label;
        const auto v = screen.vote(s);
        const bool keep = v.decision == c.label && !done(c);
        out.log.push_back({c.attempts, c.label, v.votes_ad, v.votes_healthy, keep});
        ++c.attempts;
        if (keep) {
          s.source = {"syn_" + std::string(label_name(c.label)) + "_" +
                          std::to_string(c.accepted.size()),
                      task_id};
          c.accepted.push_back(std::move(s));
        }
      }
    }
  }
  out.attempts_ad = classes[0].attempts;
  out.attempts_healthy = classes[1].attempts;
  for (auto& c : classes) {
    for (auto& s : c.accepted) out.accepted.push_back(std::move(s));
  }
  return out;
}

constexpr double kSyntheticStepMs = 5.0;

Recording series_to_recording(const AccelSeries& series, const std::string& subject_id,
                              int task_id, MovementMode mode) {
  Recording rec;
  rec.subject_id = subject_id;
  rec.task_id = task_id;
  rec.label = series.label;
  const int pen = mode == MovementMode::in_air ? 0 : 1;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  rec.samples.push_back({0.0, 0.0, 0.0, pen, 0.0});
  rec.samples.push_back({kSyntheticStepMs, 0.0, 0.0, pen, 0.0});
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x2 = series.ax[i] + 2.0 * x1 - x0;
    const double y2 = series.ay[i] + 2.0 * y1 - y0;
    rec.samples.push_back({kSyntheticStepMs * static_cast<double>(i + 2), x2, y2, pen, 0.0});
    x0 = x1;
    x1 = x2;
    y0 = y1;
    y1 = y2;
  }
  return rec;
}

void write_screening_log(std::span<const ScreeningRecord> log, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "index,class,votes_ad,votes_healthy,accepted\n";
  for (const auto& r : log) {
    out << r.index << ',' << label_name(r.label) << ',' << r.votes_ad << ',' << r.votes_healthy
        << ',' << (r.accepted ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_screened_set(const ScreenedSet& set, const fs::path& dir, MovementMode mode) {
  fs::create_directories(dir);
  Corpus corpus;
  for (const auto& s : set.accepted) {
    const int task = s.source.task_id >= kMinTask ? s.source.task_id : kMinTask;
    corpus.add(series_to_recording(s, s.source.subject_id, task, mode));
  }
  write_corpus(corpus, dir);

  std::ofstream out(dir / "series.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "series.csv").string());
  out << "subject_id,class,task_id,step,a_x,a_y\n";
  for (const auto& s : set.accepted) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.source.subject_id << ',' << label_name(s.label) << ',' << s.source.task_id << ','
          << i << ',' << text::format_double(s.ax[i]) << ',' << text::format_double(s.ay[i])
          << '\n';
    }
  }
  if (!out) throw IoError("failed writing series.csv");
  write_screening_log(set.log, dir / "screening_log.csv");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(std::string(text::trim(field)));
  return out;
}

}  // namespace

ScreenedSet read_screened_set(const fs::path& dir) {
  ScreenedSet set;
  {
    std::ifstream in(dir / "series.csv");
    if (!in) throw StageError("missing " + (dir / "series.csv").string());
    std::string line;
    std::getline(in, line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto f = split_csv(line);
      double ax = 0, ay = 0;
      std::uint64_t task = 0, step = 0;
      if (f.size() != 6 || !text::parse_u64(f[2], task) || !text::parse_u64(f[3], step) ||
          !text::parse_double(f[4], ax) || !text::parse_double(f[5], ay)) {
        throw ParseError((dir / "series.csv").string() + " line " + std::to_string(line_no));
      }
      if (set.accepted.empty() || set.accepted.back().source.subject_id != f[0]) {
        AccelSeries s;
        s.label = parse_label(f[1]);
        s.source = {f[0], static_cast<int>(task)};
        set.accepted.push_back(std::move(s));
      }
      set.accepted.back().ax.push_back(ax);
      set.accepted.back().ay.push_back(ay);
    }
  }
  {
    std::ifstream in(dir / "screening_log.csv");
    if (!in) throw StageError("missing " + (dir / "screening_log.csv").string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      const auto f = split_csv(line);
      if (f.size() != 5) throw ParseError("malformed screening log row: " + line);
      ScreeningRecord r;
      r.index = std::stoull(f[0]);
      r.label = parse_label(f[1]);
      r.votes_ad = std::stoi(f[2]);
      r.votes_healthy = std::stoi(f[3]);
      r.accepted = f[4] == "1";
      (r.label == Label::ad ? set.attempts_ad : set.attempts_healthy) += 1;
      set.log.push_back(r);
    }
  }
  return set;
}

}  // namespace airink
