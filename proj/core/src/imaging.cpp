#include "airink/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "airink/error.hpp"

namespace airink {
namespace {

constexpr int kLobes = 3;

struct Taps {
  std::vector<int> first;  // source index of each output's first tap
  std::vector<std::vector<int>> index;
  std::vector<std::vector<double>> weight;
};

Taps resample_taps(int in_size, int out_size) {
  Taps taps;
  taps.index.resize(static_cast<std::size_t>(out_size));
  taps.weight.resize(static_cast<std::size_t>(out_size));
  const double scale = static_cast<double>(in_size) / out_size;
  const double stretch = std::max(scale, 1.0);
  const double support = kLobes * stretch;
  for (int o = 0; o < out_size; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(center - support)) + 1;
    const int hi = static_cast<int>(std::floor(center + support));
    auto& idx = taps.index[static_cast<std::size_t>(o)];
    auto& w = taps.weight[static_cast<std::size_t>(o)];
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double k = lanczos_kernel((j - center) / stretch, kLobes);
      if (k == 0.0) continue;
      idx.push_back(std::clamp(j, 0, in_size - 1));
      w.push_back(k);
      total += k;
    }
    for (double& v : w) v /= total;
  }
  return taps;
}

void map_channel_to_unit_range(std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = 2.0 * (x - min) / range - 1.0;
}

}  // namespace

double lanczos_kernel(double x, int a) {
  const double ax = std::abs(x);
  if (ax >= a) return 0.0;
  if (ax == 0.0) return 1.0;
  // Exact zeros at the integers keep the same-size resample an identity.
  if (ax == std::floor(ax)) return 0.0;
  const double px = std::numbers::pi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

RowMatrix series_to_matrix(const AccelSeries& series) {
  if (series.ax.empty() || series.ax.size() != series.ay.size()) {
    throw InvalidArgument("series_to_matrix needs two non-empty channels of equal length");
  }
  const std::size_t count = 2 * series.size();
  auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  while (side * side < count) ++side;
  while (side > 1 && (side - 1) * (side - 1) >= count) --side;

  RowMatrix m = RowMatrix::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
  double* flat = m.data();
  for (std::size_t i = 0; i < series.size(); ++i) {
    flat[2 * i] = series.ax[i];
    flat[2 * i + 1] = series.ay[i];
  }
  return m;
}

RowMatrix lanczos_resize(const RowMatrix& input, int out_side) {
  if (input.rows() < 1 || input.cols() < 1 || out_side < 1) {
    throw InvalidArgument("lanczos_resize needs a non-empty input and output");
  }
  const auto rows = static_cast<int>(input.rows());
  const auto cols = static_cast<int>(input.cols());
  const auto col_taps = resample_taps(cols, out_side);
  const auto row_taps = resample_taps(rows, out_side);

  RowMatrix horizontal(rows, out_side);
  for (int r = 0; r < rows; ++r) {
    for (int o = 0; o < out_side; ++o) {
      const auto& idx = col_taps.index[static_cast<std::size_t>(o)];
      const auto& w = col_taps.weight[static_cast<std::size_t>(o)];
      double acc = 0.0;
      for (std::size_t k = 0; k < idx.size(); ++k) acc += w[k] * input(r, idx[k]);
      horizontal(r, o) = acc;
    }
  }
  RowMatrix out(out_side, out_side);
  for (int o = 0; o < out_side; ++o) {
    const auto& idx = row_taps.index[static_cast<std::size_t>(o)];
    const auto& w = row_taps.weight[static_cast<std::size_t>(o)];
    for (int c = 0; c < out_side; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < idx.size(); ++k) acc += w[k] * horizontal(idx[k], c);
      out(o, c) = acc;
    }
  }
  return out;
}

GrayImage series_to_image(const AccelSeries& series) {
  AccelSeries unit = series;
  map_channel_to_unit_range(unit.ax);
  map_channel_to_unit_range(unit.ay);

  RowMatrix m = series_to_matrix(unit);
  const double min = m.minCoeff();
  const double range = m.maxCoeff() - min;
  if (range > 0.0) {
    m = (m.array() - min) / range;
  } else {
    m.setConstant(0.5);
  }
  const RowMatrix resized = lanczos_resize(m, kImageSide);

  GrayImage img;
  img.provenance = series.source.subject_id + "/task_" + std::to_string(series.source.task_id);
  for (int r = 0; r < kImageSide; ++r) {
    for (int c = 0; c < kImageSide; ++c) {
      img.pixels[static_cast<std::size_t>(r * kImageSide + c)] = std::clamp(resized(r, c), 0.0, 1.0);
    }
  }
  return img;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << kImageSide << ' ' << kImageSide << "\n255\n";
  for (double v : image.pixels) {
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace airink
