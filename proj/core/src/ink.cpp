#include "airink/ink.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "airink/error.hpp"

namespace airink {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void standardize(std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  double scale = 1.0;
  for (double x : v) {
    var += (x - mean) * (x - mean);
    scale = std::max(scale, std::abs(x));
  }
  const double sd = std::sqrt(var / n);
  if (sd <= 1e-12 * scale) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = (x - mean) / sd;
}

}  // namespace

std::string_view label_name(Label label) { return label == Label::ad ? "ad" : "healthy"; }

Label parse_label(std::string_view text) {
  const auto s = lower(text);
  if (s == "ad") return Label::ad;
  if (s == "healthy") return Label::healthy;
  throw InvalidArgument("unknown class label '" + std::string(text) + "'");
}

std::string_view mode_name(MovementMode mode) {
  switch (mode) {
    case MovementMode::in_air: return "in_air";
    case MovementMode::on_paper: return "on_paper";
    case MovementMode::both: return "both";
  }
  return "both";
}

MovementMode parse_mode(std::string_view text) {
  auto s = lower(text);
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "in_air" || s == "inair") return MovementMode::in_air;
  if (s == "on_paper" || s == "onpaper") return MovementMode::on_paper;
  if (s == "both") return MovementMode::both;
  throw InvalidArgument("unknown movement mode '" + std::string(text) + "'");
}

void Recording::validate() const {
  if (task_id < kMinTask || task_id > kMaxTask) {
    throw InvalidArgument("task id " + std::to_string(task_id) + " outside 1..25");
  }
  if (samples.empty()) throw InvalidArgument("recording " + subject_id + " has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.pen_down != 0 && s.pen_down != 1) {
      throw InvalidArgument("sample " + std::to_string(i) + ": pen_down must be 0 or 1");
    }
    if (s.pressure < 0.0 || (s.pen_down == 0 && s.pressure != 0.0)) {
      throw InvalidArgument("sample " + std::to_string(i) + ": invalid pressure");
    }
    if (i > 0 && s.t < samples[i - 1].t) {
      throw InvalidArgument("sample " + std::to_string(i) + ": timestamp decreases");
    }
  }
}

std::vector<PointSample> segment_points(const Recording& rec, MovementMode mode) {
  if (mode == MovementMode::both) {
    if (rec.samples.empty()) throw EmptySegment(rec.subject_id + ": recording is empty");
    return rec.samples;
  }
  const int wanted = mode == MovementMode::on_paper ? 1 : 0;
  std::vector<PointSample> out;
  std::copy_if(rec.samples.begin(), rec.samples.end(), std::back_inserter(out),
               [wanted](const PointSample& s) { return s.pen_down == wanted; });
  if (out.empty()) {
    throw EmptySegment(rec.subject_id + " task " + std::to_string(rec.task_id) + " has no " +
                       std::string(mode_name(mode)) + " samples");
  }
  return out;
}

AccelSeries compute_acceleration(std::span<const PointSample> points) {
  if (points.size() < 3) {
    throw TooShort("acceleration needs at least 3 points, got " + std::to_string(points.size()));
  }
  AccelSeries out;
  const auto n = points.size() - 2;
  out.ax.resize(n);
  out.ay.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.ax[i] = points[i + 2].x - 2.0 * points[i + 1].x + points[i].x;
    out.ay[i] = points[i + 2].y - 2.0 * points[i + 1].y + points[i].y;
  }
  return out;
}

AccelSeries z_normalize(AccelSeries series) {
  if (series.ax.empty() || series.ax.size() != series.ay.size()) {
    throw InvalidArgument("z_normalize needs two non-empty channels of equal length");
  }
  standardize(series.ax);
  standardize(series.ay);
  return series;
}

AccelSeries recording_to_series(const Recording& rec, MovementMode mode) {
  const auto points = segment_points(rec, mode);
  auto series = z_normalize(compute_acceleration(points));
  series.label = rec.label;
  series.source = {rec.subject_id, rec.task_id};
  return series;
}

}  // namespace airink
