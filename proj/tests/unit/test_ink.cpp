#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "airink/error.hpp"
#include "airink/ink.hpp"
#include "airink/rng.hpp"
#include "oracles.hpp"

using namespace airink;

namespace {

Recording with_flags(const std::vector<int>& flags) {
  Recording rec;
  rec.subject_id = "s1";
  rec.task_id = 13;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    rec.samples.push_back({static_cast<double>(i), static_cast<double>(i), 0.0, flags[i],
                           flags[i] ? 100.0 : 0.0});
  }
  return rec;
}

std::vector<PointSample> path(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<PointSample> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({double(i), x[i], y[i], 1, 1.0});
  return pts;
}

AccelSeries series(std::vector<double> ax, std::vector<double> ay) {
  AccelSeries s;
  s.ax = std::move(ax);
  s.ay = std::move(ay);
  return s;
}

}  // namespace

TEST_CASE("segment_points selects by pen state") {
  const auto rec = with_flags({1, 1, 0, 0, 1});
  auto xs = [](const std::vector<PointSample>& v) {
    std::vector<double> out;
    for (const auto& p : v) out.push_back(p.x);
    return out;
  };
  CHECK(xs(segment_points(rec, MovementMode::in_air)) == std::vector<double>{2, 3});
  CHECK(xs(segment_points(rec, MovementMode::on_paper)) == std::vector<double>{0, 1, 4});
  CHECK(segment_points(rec, MovementMode::both) == rec.samples);
  CHECK_THROWS_AS(segment_points(with_flags({1, 1}), MovementMode::in_air), EmptySegment);
  CHECK_THROWS_AS(segment_points(with_flags({0}), MovementMode::on_paper), EmptySegment);
}

TEST_CASE("in-air and on-paper partition the full recording") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> flags(1 + rng.below(40));
    for (auto& f : flags) f = static_cast<int>(rng.below(2));
    flags[0] = 0;
    flags.push_back(1);
    const auto rec = with_flags(flags);
    const auto air = segment_points(rec, MovementMode::in_air);
    const auto paper = segment_points(rec, MovementMode::on_paper);
    CHECK(air.size() + paper.size() == rec.samples.size());
    // Timestamps are unique, so merging by time must rebuild the recording.
    std::vector<PointSample> merged;
    std::merge(air.begin(), air.end(), paper.begin(), paper.end(), std::back_inserter(merged),
               [](const PointSample& a, const PointSample& b) { return a.t < b.t; });
    CHECK(merged == rec.samples);
  }
}

TEST_CASE("acceleration is the second difference") {
  const auto a = compute_acceleration(path({0, 1, 4, 9, 16}, {3, 3, 3, 3, 3}));
  CHECK(a.ax == std::vector<double>{2, 2, 2});
  CHECK(a.ay == std::vector<double>{0, 0, 0});
  CHECK(compute_acceleration(path({1, 2, 3}, {1, 1, 1})).size() == 1);
  CHECK_THROWS_AS(compute_acceleration(path({1, 2}, {1, 1})), TooShort);
}

TEST_CASE("acceleration is linear in the coordinates") {
  RandomStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng.below(50);
    std::vector<double> px(n), py(n), qx(n), qy(n), rx(n), ry(n);
    const double alpha = rng.normal(), beta = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = rng.normal(0, 100);
      py[i] = rng.normal(0, 100);
      qx[i] = rng.normal(0, 100);
      qy[i] = rng.normal(0, 100);
      rx[i] = alpha * px[i] + beta * qx[i];
      ry[i] = alpha * py[i] + beta * qy[i];
    }
    const auto ap = compute_acceleration(path(px, py));
    const auto aq = compute_acceleration(path(qx, qy));
    const auto ar = compute_acceleration(path(rx, ry));
    REQUIRE(ar.size() == n - 2);
    for (std::size_t i = 0; i < ar.size(); ++i) {
      CHECK(std::abs(ar.ax[i] - (alpha * ap.ax[i] + beta * aq.ax[i])) < 1e-9);
      CHECK(std::abs(ar.ay[i] - (alpha * ap.ay[i] + beta * aq.ay[i])) < 1e-9);
    }
  }
}

TEST_CASE("z_normalize examples") {
  const auto z = z_normalize(series({2, 4, 6}, {5, 5, 5}));
  CHECK(z.ax[0] == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z.ax[1] == doctest::Approx(0.0));
  CHECK(z.ax[2] == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(z.ay == std::vector<double>{0, 0, 0});
  CHECK(z_normalize(series({7}, {-1})).ax == std::vector<double>{0});
  CHECK_THROWS_AS(z_normalize(series({}, {})), InvalidArgument);
  CHECK_THROWS_AS(z_normalize(series({1, 2}, {1})), InvalidArgument);
}

TEST_CASE("z_normalize statistics and idempotence") {
  RandomStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> ax(n), ay(n);
    const double scale = std::exp(rng.uniform(-5, 5));
    for (std::size_t i = 0; i < n; ++i) {
      ax[i] = rng.normal(3, scale);
      ay[i] = rng.uniform(-scale, scale) + 1e3;
    }
    const auto once = z_normalize(series(ax, ay));
    for (const auto* ch : {&once.ax, &once.ay}) {
      CHECK(std::abs(oracle::mean(*ch)) < 1e-9);
      CHECK(std::abs(std::sqrt(oracle::variance(*ch)) - 1.0) < 1e-9);
    }
    const auto twice = z_normalize(once);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(twice.ax[i] - once.ax[i]) < 1e-9);
      CHECK(std::abs(twice.ay[i] - once.ay[i]) < 1e-9);
    }
  }
}

TEST_CASE("recording_to_series carries provenance") {
  auto rec = with_flags({1, 1, 1, 1, 0, 0});
  rec.label = Label::ad;
  const auto s = recording_to_series(rec, MovementMode::on_paper);
  CHECK(s.size() == 2);
  CHECK(s.label == Label::ad);
  CHECK(s.source == SeriesSource{"s1", 13});
  CHECK_THROWS_AS(recording_to_series(rec, MovementMode::in_air), TooShort);
}

TEST_CASE("labels, modes and recording validation") {
  CHECK(parse_label("AD") == Label::ad);
  CHECK(parse_label("Healthy") == Label::healthy);
  CHECK_THROWS_AS(parse_label("control"), InvalidArgument);
  for (auto m : kModes) CHECK(parse_mode(mode_name(m)) == m);
  CHECK(parse_mode("in-air") == MovementMode::in_air);
  CHECK_THROWS_AS(parse_mode("air"), InvalidArgument);

  auto rec = with_flags({1, 0});
  CHECK_NOTHROW(rec.validate());
  rec.task_id = 26;
  CHECK_THROWS_AS(rec.validate(), InvalidArgument);
  rec = with_flags({1, 0});
  rec.samples[1].pressure = 3;
  CHECK_THROWS_AS(rec.validate(), InvalidArgument);
  rec = with_flags({1, 0});
  rec.samples[1].t = -1;
  CHECK_THROWS_AS(rec.validate(), InvalidArgument);
  rec.samples.clear();
  CHECK_THROWS_AS(rec.validate(), InvalidArgument);
}
