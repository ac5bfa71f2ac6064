#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hazardlab {

/// 8-bit raster image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  static RasterImage create(int width, int height, int channels);
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  void validate() const;
};

struct EllipseFit {
  double center_x = 0.0;
  double center_y = 0.0;
  double semi_major = 0.0;  // a >= b > 0
  double semi_minor = 0.0;
  double orientation = 0.0;  // radians, major axis vs x-axis, in (-pi/2, pi/2]
};

struct OtsuResult {
  int threshold = 0;       // foreground = pixels <= threshold (tissue is darker)
  RasterImage mask;        // 255 foreground, 0 background
};

/// Rec.601 luminance, rounded to nearest.
RasterImage to_grayscale(const RasterImage& image);

/// Threshold maximizing between-class variance over the 256-bin histogram;
/// ties resolved to the lowest threshold.
OtsuResult otsu_threshold(const RasterImage& gray);

/// Moment-based fit over mask foreground: centroid plus the eigen-decomposed
/// second central moments (semi-axes = 2 sqrt(eigenvalue)).
EllipseFit fit_ellipse(const RasterImage& mask);

/// side x side window centered at (cx, cy), shifted inward at the borders
/// (never padded).
RasterImage center_crop(const RasterImage& image, double cx, double cy, int side);

/// Row-major non-overlapping tiling; image side must be divisible.
std::vector<RasterImage> tile(const RasterImage& image, int patch_side);

/// One of the 8 dihedral transforms of a square image: element & 3 counts
/// quarter turns, bit 2 mirrors horizontally first. Element 0 is the identity.
RasterImage dihedral(const RasterImage& image, int element);

/// Random dihedral transform chosen by a seeded generator; lossless.
RasterImage augment(const RasterImage& image, std::uint64_t seed);

RasterImage resize_bilinear(const RasterImage& image, int out_width, int out_height);

using OrdinalLabel = std::array<double, 5>;

/// Cumulative encoding: entry i is 1 iff i < class.
OrdinalLabel isup_encode(int isup_class);
/// round(clamp(sum of outputs, 0, 5)).
int isup_decode(const std::vector<double>& output);

/// Summed element-wise binary cross-entropy (negated for minimization).
double ordinal_xent(const std::vector<double>& output, const OrdinalLabel& label,
                    double epsilon = 1e-7);

}  // namespace hazardlab
