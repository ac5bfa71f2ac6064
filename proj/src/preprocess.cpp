#include "hazardlab/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

RasterImage RasterImage::create(int width, int height, int channels) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3))
    raise(ErrorKind::invalid_input, "image must be w x h with 1 or 3 channels");
  RasterImage img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(width) * height * channels, 0);
  return img;
}

void RasterImage::validate() const {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3))
    raise(ErrorKind::invalid_input, "image must be w x h with 1 or 3 channels");
  if (pixels.size() != static_cast<std::size_t>(width) * height * channels)
    raise(ErrorKind::invalid_input, "pixel buffer does not match image dimensions");
}

RasterImage to_grayscale(const RasterImage& image) {
  image.validate();
  if (image.channels != 3)
    raise(ErrorKind::invalid_input, "to_grayscale expects a 3-channel image");
  RasterImage gray = RasterImage::create(image.width, image.height, 1);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double lum =
          0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) + 0.114 * image.at(x, y, 2);
      gray.at(x, y) = static_cast<std::uint8_t>(std::lround(lum));
    }
  }
  return gray;
}

OtsuResult otsu_threshold(const RasterImage& gray) {
  gray.validate();
  if (gray.channels != 1)
    raise(ErrorKind::invalid_input, "otsu_threshold expects a single-channel image");

  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t p : gray.pixels) ++hist[p];

  const double total = static_cast<double>(gray.pixels.size());
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];

  int best_t = -1;
  double best_var = -1.0;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best_var) {  // strict: ties keep the lowest threshold
      best_var = between;
      best_t = t;
    }
  }
  if (best_t < 0)
    raise(ErrorKind::degenerate_histogram, "constant image has no Otsu threshold");

  OtsuResult out;
  out.threshold = best_t;
  out.mask = RasterImage::create(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i)
    out.mask.pixels[i] = gray.pixels[i] <= best_t ? 255 : 0;
  return out;
}

EllipseFit fit_ellipse(const RasterImage& mask) {
  mask.validate();
  if (mask.channels != 1) raise(ErrorKind::invalid_input, "fit_ellipse expects a mask");

  double n = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        n += 1.0;
        sx += x;
        sy += y;
      }
  if (n < 5.0) raise(ErrorKind::insufficient_data, "ellipse fit needs >= 5 foreground pixels");

  const double cx = sx / n;
  const double cy = sy / n;
  double mxx = 0.0, myy = 0.0, mxy = 0.0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        const double dx = x - cx;
        const double dy = y - cy;
        mxx += dx * dx;
        myy += dy * dy;
        mxy += dx * dy;
      }
  mxx /= n;
  myy /= n;
  mxy /= n;

  // eigenvalues of the 2x2 central moment matrix
  const double tr = mxx + myy;
  const double det = mxx * myy - mxy * mxy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double l1 = 0.5 * tr + disc;
  const double l2 = 0.5 * tr - disc;

  EllipseFit fit;
  fit.center_x = cx;
  fit.center_y = cy;
  fit.semi_major = 2.0 * std::sqrt(std::max(0.0, l1));
  fit.semi_minor = 2.0 * std::sqrt(std::max(0.0, l2));
  fit.orientation = (mxy == 0.0 && mxx >= myy) ? 0.0 : 0.5 * std::atan2(2.0 * mxy, mxx - myy);
  if (fit.orientation <= -std::numbers::pi / 2) fit.orientation += std::numbers::pi;
  return fit;
}

RasterImage center_crop(const RasterImage& image, double cx, double cy, int side) {
  image.validate();
  if (side < 1 || side > image.width || side > image.height)
    raise(ErrorKind::invalid_input, "crop side must fit inside the image");

  const auto clamp_origin = [&](double center, int extent) {
    int origin = static_cast<int>(std::lround(center - side / 2.0));
    return std::clamp(origin, 0, extent - side);
  };
  const int x0 = clamp_origin(cx, image.width);
  const int y0 = clamp_origin(cy, image.height);

  RasterImage out = RasterImage::create(side, side, image.channels);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int c = 0; c < image.channels; ++c) out.at(x, y, c) = image.at(x0 + x, y0 + y, c);
  return out;
}

std::vector<RasterImage> tile(const RasterImage& image, int patch_side) {
  image.validate();
  if (patch_side < 1 || image.width % patch_side != 0 || image.height % patch_side != 0)
    raise(ErrorKind::invalid_input, "image sides must be divisible by the patch side");

  std::vector<RasterImage> patches;
  patches.reserve(static_cast<std::size_t>(image.width / patch_side) *
                  (image.height / patch_side));
  for (int py = 0; py < image.height; py += patch_side) {
    for (int px = 0; px < image.width; px += patch_side) {
      RasterImage patch = RasterImage::create(patch_side, patch_side, image.channels);
      for (int y = 0; y < patch_side; ++y)
        for (int x = 0; x < patch_side; ++x)
          for (int c = 0; c < image.channels; ++c)
            patch.at(x, y, c) = image.at(px + x, py + y, c);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

RasterImage dihedral(const RasterImage& image, int element) {
  image.validate();
  if (image.width != image.height)
    raise(ErrorKind::invalid_input, "dihedral transforms need a square image");
  if (element < 0 || element > 7) raise(ErrorKind::invalid_input, "dihedral element in 0..7");

  const int n = image.width;
  const bool mirror = element & 4;
  const int rot = element & 3;
  RasterImage out = RasterImage::create(n, n, image.channels);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      int sx = mirror ? n - 1 - x : x;
      int sy = y;
      for (int r = 0; r < rot; ++r) {  // inverse of a 90-degree ccw rotation
        const int tx = n - 1 - sy;
        sy = sx;
        sx = tx;
      }
      for (int c = 0; c < image.channels; ++c) out.at(x, y, c) = image.at(sx, sy, c);
    }
  }
  return out;
}

RasterImage augment(const RasterImage& image, std::uint64_t seed) {
  num::Rng rng(seed);
  return dihedral(image, static_cast<int>(rng.integer(8)));
}

RasterImage resize_bilinear(const RasterImage& image, int out_width, int out_height) {
  image.validate();
  if (out_width < 1 || out_height < 1)
    raise(ErrorKind::invalid_input, "target size must be positive");

  RasterImage out = RasterImage::create(out_width, out_height, image.channels);
  const double sx = static_cast<double>(image.width) / out_width;
  const double sy = static_cast<double>(image.height) / out_height;
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels; ++c) {
        const double top = (1.0 - wx) * image.at(x0, y0, c) + wx * image.at(x1, y0, c);
        const double bottom = (1.0 - wx) * image.at(x0, y1, c) + wx * image.at(x1, y1, c);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround((1.0 - wy) * top + wy * bottom));
      }
    }
  }
  return out;
}

OrdinalLabel isup_encode(int isup_class) {
  if (isup_class < 0 || isup_class > 5)
    raise(ErrorKind::invalid_input, "ISUP class must lie in 0..5");
  OrdinalLabel label{};
  for (int i = 0; i < 5; ++i) label[i] = i < isup_class ? 1.0 : 0.0;
  return label;
}

int isup_decode(const std::vector<double>& output) {
  if (output.size() != 5) raise(ErrorKind::invalid_input, "decode expects 5 outputs");
  double sum = 0.0;
  for (double o : output) sum += o;
  return static_cast<int>(std::lround(std::clamp(sum, 0.0, 5.0)));
}

double ordinal_xent(const std::vector<double>& output, const OrdinalLabel& label,
                    double epsilon) {
  if (output.size() != label.size())
    raise(ErrorKind::invalid_input, "output and label lengths differ");
  double loss = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const double o = std::clamp(output[i], epsilon, 1.0 - epsilon);
    loss -= label[i] * std::log(o) + (1.0 - label[i]) * std::log(1.0 - o);
  }
  return loss;
}

}  // namespace hazardlab
