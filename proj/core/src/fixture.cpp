#include <cmath>
#include <cstdio>
#include <numbers>

#include "airink/corpus.hpp"
#include "airink/error.hpp"
#include "airink/rng.hpp"

namespace airink {
namespace {

constexpr double kSampleIntervalMs = 5.0;
constexpr double kBaseNoise = 0.4;
constexpr int kPaperRuns = 5;

struct Wave {
  double amplitude;
  double omega;
  double phase;
};

std::vector<Wave> random_waves(RandomStream& rng) {
  const auto count = 2 + static_cast<int>(rng.below(3));
  std::vector<Wave> waves;
  for (int k = 0; k < count; ++k) {
    const double period = rng.uniform(40.0, 60.0);
    waves.push_back({rng.uniform(30.0, 50.0), 2.0 * std::numbers::pi / period,
                     rng.uniform(0.0, 2.0 * std::numbers::pi)});
  }
  return waves;
}

double evaluate(const std::vector<Wave>& waves, double i) {
  double v = 0.0;
  for (const auto& w : waves) v += w.amplitude * std::sin(w.omega * i + w.phase);
  return v;
}

Recording fixture_recording(const std::string& subject, Label label, int task_id,
                            std::uint64_t seed, double separation) {
  RandomStream rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(task_id)), subject));
  const double scale = label == Label::ad ? 1.0 + separation : 1.0;
  const double noise = kBaseNoise * scale;

  const auto wx = random_waves(rng);
  const auto wy = random_waves(rng);
  const double x0 = rng.uniform(1000.0, 3000.0);
  const double y0 = rng.uniform(1000.0, 3000.0);
  const double drift = rng.uniform(1.0, 2.0);
  const double pressure_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  // Alternating runs, on paper first and last, so both modes are non-empty.
  std::vector<std::pair<int, int>> runs;  // (pen_down, length)
  for (int r = 0; r < kPaperRuns; ++r) {
    runs.emplace_back(1, 50 + static_cast<int>(rng.below(31)));
    if (r + 1 < kPaperRuns) {
      runs.emplace_back(0, static_cast<int>(std::lround(rng.uniform(45.0, 65.0) * scale)));
    }
  }

  Recording rec;
  rec.subject_id = subject;
  rec.task_id = task_id;
  rec.label = label;
  std::size_t i = 0;
  for (const auto& [pen_down, length] : runs) {
    for (int k = 0; k < length; ++k, ++i) {
      const double step = static_cast<double>(i);
      PointSample s;
      s.t = step * kSampleIntervalMs;
      s.x = x0 + drift * step + evaluate(wx, step) + rng.normal(0.0, noise);
      s.y = y0 + evaluate(wy, step) + rng.normal(0.0, noise);
      s.pen_down = pen_down;
      s.pressure =
          pen_down ? std::round(500.0 + 200.0 * std::sin(0.05 * step + pressure_phase)) : 0.0;
      rec.samples.push_back(s);
    }
  }
  return rec;
}

}  // namespace

Corpus make_fixture_corpus(std::uint64_t seed, std::size_t n_per_class, int task_id,
                           double separation) {
  if (n_per_class < 1) throw InvalidArgument("fixture needs at least one subject per class");
  if (separation < 0.0) throw InvalidArgument("fixture separation must be non-negative");
  Corpus corpus;
  for (Label label : kLabels) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      char id[48];
      std::snprintf(id, sizeof id, "fx_%s_%04zu", std::string(label_name(label)).c_str(), i);
      corpus.add(fixture_recording(id, label, task_id, seed, separation));
    }
  }
  return corpus;
}

}  // namespace airink
