#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "airink/ink.hpp"
#include "airink/tensor.hpp"

namespace airink {

inline constexpr int kImageSide = 64;

/// 64 x 64 grayscale image, row-major, pixels in [0, 1].
struct GrayImage {
  std::vector<double> pixels = std::vector<double>(kImageSide * kImageSide, 0.0);
  std::string provenance;

  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row * kImageSide + col)]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Interleaves the channels as ax0, ay0, ax1, ay1, ... and fills an n x n
/// matrix row-major, n = ceil(sqrt(2L)), zero-padding the tail.
RowMatrix series_to_matrix(const AccelSeries& series);

/// Separable Lanczos-3 resampling to out_side x out_side. Per-pixel weights
/// are renormalised to sum to one; source coordinates clamp at the edges.
RowMatrix lanczos_resize(const RowMatrix& input, int out_side = kImageSide);

/// Windowed-sinc Lanczos kernel with lobe count `a`.
double lanczos_kernel(double x, int a = 3);

/// Series -> square matrix -> [0,1] min-max -> Lanczos 64x64 -> clamp.
///
/// Each channel is first mapped onto [-1, 1] by its own range (a constant
/// channel maps to 0, which is also the padding value), so the image does not
/// change under channel-wise positive affine transforms.
GrayImage series_to_image(const AccelSeries& series);

/// Binary PGM (P5) dump, pixel = round(value * 255).
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace airink
