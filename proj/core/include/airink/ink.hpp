#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace airink {

enum class Label { ad, healthy };

inline constexpr Label kLabels[] = {Label::ad, Label::healthy};

std::string_view label_name(Label label);
/// Accepts "ad" / "healthy" (case-insensitive).
Label parse_label(std::string_view text);

/// One tablet sample.
struct PointSample {
  double t = 0.0;  // milliseconds
  double x = 0.0;
  double y = 0.0;
  int pen_down = 0;
  double pressure = 0.0;

  friend bool operator==(const PointSample&, const PointSample&) = default;
};

inline constexpr int kMinTask = 1;
inline constexpr int kMaxTask = 25;

/// One subject's pen trace for one task.
struct Recording {
  std::string subject_id;
  int task_id = 0;
  Label label = Label::healthy;
  std::vector<PointSample> samples;

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;

  friend bool operator==(const Recording&, const Recording&) = default;
};

enum class MovementMode { in_air, on_paper, both };

inline constexpr MovementMode kModes[] = {MovementMode::in_air, MovementMode::on_paper,
                                          MovementMode::both};

std::string_view mode_name(MovementMode mode);
/// Accepts in_air / on_paper / both (also "in-air", "on-paper").
MovementMode parse_mode(std::string_view text);

struct SeriesSource {
  std::string subject_id;
  int task_id = 0;

  friend bool operator==(const SeriesSource&, const SeriesSource&) = default;
};

/// Two-channel acceleration series; the generator's unit of input and output.
struct AccelSeries {
  std::vector<double> ax;
  std::vector<double> ay;
  Label label = Label::healthy;
  SeriesSource source;

  std::size_t size() const noexcept { return ax.size(); }

  friend bool operator==(const AccelSeries&, const AccelSeries&) = default;
};

/// Samples of the requested movement mode in recording order. Throws
/// EmptySegment when the recording has none.
std::vector<PointSample> segment_points(const Recording& rec, MovementMode mode);

/// Second difference of the raw coordinates (uniform sampling assumed):
/// a[i] = p[i+2] - 2 p[i+1] + p[i]. Throws TooShort below 3 points.
AccelSeries compute_acceleration(std::span<const PointSample> points);

/// Per-channel standardisation to zero mean and unit (population) standard
/// deviation; zero-variance channels become all zeros.
AccelSeries z_normalize(AccelSeries series);

/// segment_points -> compute_acceleration -> z_normalize, with label and
/// provenance copied from the recording.
AccelSeries recording_to_series(const Recording& rec, MovementMode mode);

}  // namespace airink
