#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sae/matrix.hpp"

namespace sae {

enum class ResizeFilter { nearest, bilinear };

struct PreprocessConfig {
  std::size_t target_height = 270;
  std::size_t target_width = 270;
  ResizeFilter filter = ResizeFilter::bilinear;

  std::size_t flat_width() const noexcept { return target_height * target_width; }
  void validate() const;
};

std::string to_string(ResizeFilter f);
ResizeFilter parse_resize_filter(const std::string& name);

// 8-bit raster, interleaved channels (1 = gray, 3 = RGB).
struct RasterImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
};

// Binary PGM (P5) and PPM (P6). 16-bit samples (maxval > 255) are
// big-endian; any maxval other than 255 is rescaled to 0..255.
RasterImage read_pnm(const std::filesystem::path& path);
RasterImage parse_pnm(std::span<const std::uint8_t> bytes);
void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> gray);

// round(0.299 r + 0.587 g + 0.114 b), computed in integers.
std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;
// Gray plane (height x width matrix of 0..255 values).
Matrix gray_plane(const RasterImage& img);

// Resamples a height x width plane with pixel-center alignment; edges clamp.
Matrix resize(const Matrix& plane, std::size_t height, std::size_t width, ResizeFilter filter);

// gray -> resize -> /255 -> one row of length height * width.
Matrix load_image(const std::filesystem::path& path, const PreprocessConfig& cfg);
Matrix preprocess(const RasterImage& img, const PreprocessConfig& cfg);

// Row-major reshape; the inverse of flattening.
Matrix reshape(const Matrix& m, std::size_t rows, std::size_t cols);

}  // namespace sae
