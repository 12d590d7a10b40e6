// Acceptance run: one PASS/FAIL/SKIP line per criterion.
//   airink_acceptance            all criteria
//   airink_acceptance 2 7 8      a subset
// Exit status is 1 when any selected criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "airink/error.hpp"
#include "airink/generator.hpp"
#include "airink/imaging.hpp"
#include "airink/judge.hpp"
#include "airink/mdn.hpp"
#include "airink/pipeline.hpp"
#include "airink/report.hpp"
#include "grad_suite.hpp"
#include "image_sets.hpp"
#include "oracles.hpp"

using namespace airink;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 120.0;
constexpr double kDeterminismSeconds = 15 * 60.0;
constexpr double kSanityAccuracy = 85.0;
constexpr double kSanitySeconds = 30 * 60.0;
constexpr double kVarianceTolerance = 0.25;  // relative
constexpr double kLagTolerance = 0.15;       // absolute
constexpr double kImageTolerance = 1e-12;
constexpr double kAffineTolerance = 1e-9;
constexpr double kChiSquare19At01 = 36.190869;  // upper 1% point, 19 dof
constexpr double kDarwinWindow = 10.0;          // percentage points

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::pass : Outcome::fail, std::move(detail)};
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- 1
Outcome gradients() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::vector<std::string> failing;
  const auto cases = acceptance::grad_cases();
  for (const auto& c : cases) {
    const double err = grad_check(c.f, c.point, c.eps);
    if (err > worst) {
      worst = err;
      worst_name = c.name;
    }
    if (!(err < kGradTolerance)) failing.push_back(c.name);
  }
  const double secs = seconds_since(start);
  std::string detail = fmt("%zu ops, max rel error %.2e (%s), %.1f s", cases.size(), worst,
                           worst_name.c_str(), secs);
  for (const auto& f : failing) detail += "; failed: " + f;
  return verdict(failing.empty() && secs < kGradSeconds, detail);
}

// ---------------------------------------------------------------- 2
Outcome reference_means() {
  AccuracyReport r;
  r.rows.push_back({13, MovementMode::in_air, 0, {62.50, 57.14, 50.00, 50.00, 64.28}});
  r.rows.push_back({16, MovementMode::in_air, 0, {50.00, 71.42, 52.94, 68.42, 42.85}});
  const auto m13 = format_percent(r.rows[0].mean());
  const auto m16 = format_percent(r.rows[1].mean());
  const auto csv = report_csv(r);
  const bool ok = m13 == "56.78" && m16 == "57.12" &&
                  csv.find("13,in_air,0,62.50,57.14,50.00,50.00,64.28,56.78\n") != std::string::npos &&
                  csv.find("16,in_air,0,50.00,71.42,52.94,68.42,42.85,57.12\n") != std::string::npos;
  return verdict(ok, "task 13 mean " + m13 + ", task 16 mean " + m16);
}

// ---------------------------------------------------------------- 3
#ifdef AIRINK_CLI_PATH
int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" AIRINK_CLI_PATH "' " + args +
                          " >>'" + (dir / "cli.log").string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// n_per_class 20, generator epochs 10, classifier max epochs 200. One task,
// mode and repetition with budgets 0 and 5 keeps two runs inside the limit.
const std::string kDeterminismArgs =
    "--run.corpus_root=corpus --run.output_dir=out --run.tasks=13 --run.modes=both "
    "--run.budgets=0,5 --clf.folds=1 --clf.max_epochs=200 --generator.epochs=10 --seed 11 ";

Outcome determinism() {
  const std::string unit = "out/stages/task13/both/rep1/";
  const std::vector<std::string> names{"out/report.csv",
                                       unit + "gen_ad.ckpt",
                                       unit + "gen_healthy.ckpt",
                                       unit + "budget5/screened/series.csv",
                                       unit + "budget5/screened/screening_log.csv",
                                       unit + "samples/series.csv"};
  std::vector<std::vector<std::string>> files;
  std::vector<double> times;
  for (const char* name : {"determinism_a", "determinism_b"}) {
    const auto dir = oracle::temp_dir(name);
    const auto log = (dir / "cli.log").string();
    if (const int code = run_cli(dir, kDeterminismArgs + "fixture --n 20"); code != 0) {
      return verdict(false, fmt("fixture exited with %d (see %s)", code, log.c_str()));
    }
    const auto start = std::chrono::steady_clock::now();
    for (const std::string step :
         {"evaluate", "generate --count 8 --task 13 --mode both --rep 1"}) {
      if (const int code = run_cli(dir, kDeterminismArgs + step); code != 0) {
        return verdict(false, fmt("'%s' exited with %d (see %s)", step.c_str(), code, log.c_str()));
      }
    }
    times.push_back(seconds_since(start));
    files.emplace_back();
    for (const auto& f : names) files.back().push_back(oracle::read_file(dir / f));
  }
  std::string differing;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (files[0][i].empty() || files[0][i] != files[1][i]) differing += " " + names[i];
  }
  const double slowest = std::max(times[0], times[1]);
  const std::string artifacts = differing.empty() ? "byte-identical" : "differ:" + differing;
  return verdict(differing.empty() && slowest < kDeterminismSeconds,
                 fmt("report (budgets 0 and 5), generator checkpoints, screened set and samples %s; "
                     "runs %.0f s and %.0f s",
                     artifacts.c_str(), times[0], times[1]));
}
#else
Outcome determinism() { return verdict(false, "command-line tool not built"); }
#endif

// ---------------------------------------------------------------- 4
Outcome separable_sanity() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = make_fixture_corpus(21, 40, 13, 2.0);
  RunConfig cfg;
  cfg.corpus_root = "fixture";
  cfg.output_dir = oracle::temp_dir("sanity");
  cfg.tasks = {13};
  cfg.modes = {MovementMode::both};
  cfg.budgets = {0};
  cfg.threads = 1;
  cfg.seed = 21;
  cfg.clf.folds = 5;
  // The reference learning rate does not leave the initial plateau at this
  // scale; 5e-3 converges within about 40 epochs.
  cfg.clf.learning_rate = 5e-3;
  cfg.clf.max_epochs = 100;
  cfg.clf.patience = 50;
  const auto report = run_matrix(corpus, cfg);
  const auto& row = report.rows.at(0);
  const double secs = seconds_since(start);
  std::string reps;
  for (double a : row.accuracies) reps += (reps.empty() ? "" : " ") + format_percent(a);
  return verdict(row.mean() >= kSanityAccuracy && secs < kSanitySeconds,
                 "mean " + format_percent(row.mean()) + " over [" + reps + "], " +
                     fmt("%.0f s", secs));
}

// ---------------------------------------------------------------- 5
struct SeriesStats {
  double variance = 0.0;
  double lag1 = 0.0;
};

SeriesStats stats_of(const std::vector<double>& v) {
  return {oracle::variance(v), oracle::lag1_autocorrelation(v)};
}

Outcome generator_fidelity() {
  constexpr double kPhi[2] = {0.8, 0.5};
  RandomStream rng(41);
  std::vector<AccelSeries> data;
  for (int i = 0; i < 200; ++i) {
    AccelSeries s;
    s.label = Label::healthy;
    double x = rng.normal(), y = rng.normal();
    for (int t = 0; t < 300; ++t) {
      x = kPhi[0] * x + std::sqrt(1 - kPhi[0] * kPhi[0]) * rng.normal();
      y = kPhi[1] * y + std::sqrt(1 - kPhi[1] * kPhi[1]) * rng.normal();
      s.ax.push_back(x);
      s.ay.push_back(y);
    }
    data.push_back(std::move(s));
  }
  GeneratorConfig cfg;
  cfg.epochs = 100;
  cfg.hidden_size = 32;
  cfg.seed = 42;
  const auto start = std::chrono::steady_clock::now();
  const auto model = train_generator(data, cfg);
  std::vector<std::uint64_t> seeds(200);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed(43, i);
  const auto samples = model.sample(seeds);

  auto averaged = [](const std::vector<AccelSeries>& set, bool x_channel) {
    SeriesStats acc;
    for (const auto& s : set) {
      const auto st = stats_of(x_channel ? s.ax : s.ay);
      acc.variance += st.variance / static_cast<double>(set.size());
      acc.lag1 += st.lag1 / static_cast<double>(set.size());
    }
    return acc;
  };
  bool ok = true;
  std::string detail;
  for (bool x_channel : {true, false}) {
    const auto real = averaged(data, x_channel);
    const auto syn = averaged(samples, x_channel);
    const double var_rel = syn.variance / real.variance - 1.0;
    const double lag_diff = syn.lag1 - real.lag1;
    ok = ok && std::abs(var_rel) <= kVarianceTolerance && std::abs(lag_diff) <= kLagTolerance;
    detail += fmt("%s: variance %.3f vs %.3f (%+.1f%%), lag-1 %.3f vs %.3f; ", x_channel ? "ax" : "ay",
                  syn.variance, real.variance, 100 * var_rel, syn.lag1, real.lag1);
  }
  return verdict(ok, detail + fmt("%.0f s", seconds_since(start)));
}

// ---------------------------------------------------------------- 6
class OracleScreen : public Screen {
 public:
  Vote vote(const AccelSeries& s) const override {
    return s.label == Label::ad ? Vote{Label::ad, 5, 0} : Vote{Label::healthy, 0, 5};
  }
};

bool batch_independent(const Screen& screen, const std::vector<AccelSeries>& batch) {
  const auto full = filter_synthetic(screen, batch);
  std::vector<bool> kept(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    kept[i] = std::find(full.begin(), full.end(), batch[i]) != full.end();
  }
  for (unsigned mask = 0; mask < (1u << batch.size()); ++mask) {
    std::vector<AccelSeries> sub, expected;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (mask & (1u << i)) {
        sub.push_back(batch[i]);
        if (kept[i]) expected.push_back(batch[i]);
      }
    }
    if (filter_synthetic(screen, sub) != expected) return false;
  }
  return true;
}

Outcome screening_logic() {
  GeneratorConfig cfg;
  cfg.hidden_size = 6;
  cfg.mixtures = 2;
  cfg.sequence_length = 40;
  cfg.seed = 61;
  const GeneratorModel ad(cfg, Label::ad);
  const GeneratorModel healthy(cfg, Label::healthy);
  bool ok = true;
  std::string detail;
  for (std::size_t budget : {500u, 1000u}) {
    const auto set = generate_screened(ad, healthy, OracleScreen{}, budget, 62, 13);
    const auto n_ad = static_cast<std::size_t>(std::count_if(
        set.accepted.begin(), set.accepted.end(), [](const auto& s) { return s.label == Label::ad; }));
    const auto n_healthy = set.accepted.size() - n_ad;
    ok = ok && n_ad == budget && n_healthy == budget && set.attempts_ad == budget &&
         set.attempts_healthy == budget;
    detail += fmt("budget %zu -> %zu+%zu; ", budget, n_ad, n_healthy);
  }

  // A trained CNN ensemble judging a 10-sample batch of generator draws.
  ClfConfig clf;
  clf.learning_rate = 0.01;
  clf.max_epochs = 4;
  const auto ensemble = train_ensemble(imageset::halves(10, 63), clf, 64, imageset::cheap_arch());
  std::vector<std::uint64_t> seeds(5);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed(65, i);
  std::vector<AccelSeries> batch;
  for (const auto* g : {&ad, &healthy}) {
    for (auto s : g->sample(seeds)) {
      s.label = g->class_label();
      batch.push_back(std::move(s));
    }
  }
  const bool independent = batch_independent(ensemble, batch) && batch_independent(OracleScreen{}, batch);
  detail += std::string("batch independence over 1024 subsets ") + (independent ? "holds" : "violated");
  return verdict(ok && independent, detail);
}

// ---------------------------------------------------------------- 7
Outcome imaging_invariants() {
  RandomStream rng(71);
  int bad_constant = 0, bad_identity = 0, bad_interleave = 0, bad_affine = 0;
  std::size_t constants = 0, singles = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    AccelSeries s;
    std::size_t n = 1 + rng.below(400);
    const bool constant = trial % 10 == 0;
    if (trial % 25 == 1) n = 1;
    constants += constant;
    singles += n == 1;
    const double cx = rng.normal(), cy = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      s.ax.push_back(constant ? cx : rng.normal(0, rng.uniform(0.1, 5)));
      s.ay.push_back(constant ? cy : rng.uniform(-3, 3));
    }

    // Interleave round trip.
    const auto m = series_to_matrix(s);
    const auto side = static_cast<Eigen::Index>(std::ceil(std::sqrt(2.0 * static_cast<double>(n))));
    bool interleave_ok = m.rows() == side && m.cols() == side;
    for (Eigen::Index k = 0; interleave_ok && k < m.size(); ++k) {
      const auto i = static_cast<std::size_t>(k / 2);
      const double want = i >= n ? 0.0 : (k % 2 == 0 ? s.ax[i] : s.ay[i]);
      interleave_ok = m.data()[k] == want;
    }
    bad_interleave += !interleave_ok;

    // Constant matrices of every source size stay constant.
    const double level = rng.uniform(-10, 10);
    const RowMatrix flat = RowMatrix::Constant(side, side, level);
    bad_constant += (lanczos_resize(flat).array() - level).abs().maxCoeff() > kImageTolerance;

    // A 64x64 input is returned unchanged.
    const RowMatrix full = RowMatrix::Random(kImageSide, kImageSide);
    bad_identity += (lanczos_resize(full) - full).cwiseAbs().maxCoeff() > kImageTolerance;

    // Positive affine maps per channel leave the image unchanged.
    AccelSeries t = s;
    const double ax_scale = rng.uniform(0.01, 100), ay_scale = rng.uniform(0.01, 100);
    const double ax_shift = rng.uniform(-50, 50), ay_shift = rng.uniform(-50, 50);
    for (auto& v : t.ax) v = ax_scale * v + ax_shift;
    for (auto& v : t.ay) v = ay_scale * v + ay_shift;
    const auto a = series_to_image(s), b = series_to_image(t);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) diff = std::max(diff, std::abs(a.pixels[i] - b.pixels[i]));
    bad_affine += diff > kAffineTolerance;
    if (constant) {
      for (double p : a.pixels) bad_constant += std::abs(p - 0.5) > kImageTolerance;
    }
  }
  const bool ok = bad_constant + bad_identity + bad_interleave + bad_affine == 0;
  return verdict(ok, fmt("1000 series (%zu constant, %zu of length 1); violations: constant %d, "
                         "identity %d, interleave %d, affine %d",
                         constants, singles, bad_constant, bad_identity, bad_interleave, bad_affine));
}

// ---------------------------------------------------------------- 8
Outcome mixture_sampling() {
  constexpr std::size_t kM = 20, kDraws = 100000;
  RandomStream param_rng(81);
  std::vector<double> raw(6 * kM);
  for (auto& v : raw) v = param_rng.normal(0.0, 0.5);
  const auto params = mdn_params(raw);
  RandomStream rng(82);
  std::vector<double> counts(kM, 0.0);
  for (std::size_t i = 0; i < kDraws; ++i) counts[sample_mixture(params, rng).component] += 1.0;
  double chi2 = 0.0, min_expected = 1e300;
  for (std::size_t k = 0; k < kM; ++k) {
    const double expected = params.weight[k] * static_cast<double>(kDraws);
    min_expected = std::min(min_expected, expected);
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  return verdict(chi2 < kChiSquare19At01 && min_expected >= 5.0,
                 fmt("chi-square %.2f < %.2f (19 dof, alpha 0.01), min expected count %.0f", chi2,
                     kChiSquare19At01, min_expected));
}

// ---------------------------------------------------------------- 9
Outcome darwin_corpus() {
  const char* root = std::getenv("AIRINK_DARWIN_ROOT");
  if (!root || !*root) return {Outcome::skip, "AIRINK_DARWIN_ROOT not set"};
  const auto corpus = load_corpus(root);
  RunConfig cfg;
  cfg.corpus_root = root;
  cfg.output_dir = oracle::temp_dir("darwin");
  cfg.modes = {MovementMode::in_air};
  cfg.budgets = {0};
  const auto report = run_matrix(corpus, cfg);
  const double target[2] = {56.78, 57.12};
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < report.rows.size() && i < 2; ++i) {
    const double mean = report.rows[i].mean();
    ok = ok && std::abs(mean - target[i]) <= kDarwinWindow;
    detail += fmt("task %d mean %s (target %.2f); ", report.rows[i].task_id,
                  format_percent(mean).c_str(), target[i]);
  }
  return verdict(ok, detail);
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient suite", gradients},
      {2, "reference means", reference_means},
      {3, "end-to-end determinism", determinism},
      {4, "separable fixture accuracy", separable_sanity},
      {5, "generator fidelity", generator_fidelity},
      {6, "screening logic", screening_logic},
      {7, "imaging invariants", imaging_invariants},
      {8, "mixture sampling", mixture_sampling},
      {9, "DARWIN-format corpus", darwin_corpus},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("threw ") + e.what()};
    }
    const char* status = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    failures += o.status == Outcome::fail;
    std::printf("criterion %d (%s): %s: %s\n", c.id, c.name, status, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
