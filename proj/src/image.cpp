#include "sae/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "sae/error.hpp"

namespace sae {

void PreprocessConfig::validate() const {
  if (target_height == 0 || target_width == 0) {
    throw ParameterError("target image dimensions must be >= 1");
  }
}

std::string to_string(ResizeFilter f) {
  return f == ResizeFilter::nearest ? "nearest" : "bilinear";
}

ResizeFilter parse_resize_filter(const std::string& name) {
  if (name == "nearest") return ResizeFilter::nearest;
  if (name == "bilinear") return ResizeFilter::bilinear;
  throw ParameterError("unknown resize filter '" + name + "'");
}

namespace {

class PnmHeader {
 public:
  PnmHeader(std::span<const std::uint8_t> b, std::size_t start) : b_(b), pos_(start) {}

  std::size_t pos() const noexcept { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("PNM error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) fail(std::string("expected ") + what);
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 0xFFFFFFFFu) fail(std::string(what) + " too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) fail("expected whitespace before raster");
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_;
};

}  // namespace

RasterImage parse_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError("PNM error at offset 0: unsupported magic (need P5 or P6)");
  }
  RasterImage img;
  img.channels = bytes[1] == '5' ? 1 : 3;
  PnmHeader h(bytes, 2);
  img.width = h.number("width");
  img.height = h.number("height");
  const std::size_t maxval = h.number("maxval");
  if (img.width == 0 || img.height == 0) h.fail("zero image dimension");
  if (maxval == 0 || maxval > 65535) h.fail("maxval must be in 1..65535");
  h.single_space();

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t samples = img.width * img.height * img.channels;
  const std::size_t offset = h.pos();
  if (bytes.size() - offset < samples * sample_bytes) {
    throw FormatError("PNM error at offset " + std::to_string(bytes.size()) +
                      ": truncated raster (need " + std::to_string(samples * sample_bytes) +
                      " bytes, have " + std::to_string(bytes.size() - offset) + ")");
  }
  img.pixels.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    std::size_t v = sample_bytes == 1
                        ? bytes[offset + i]
                        : (std::size_t{bytes[offset + 2 * i]} << 8) | bytes[offset + 2 * i + 1];
    if (v > maxval) {
      throw FormatError("PNM error at offset " + std::to_string(offset + i * sample_bytes) +
                        ": sample exceeds maxval");
    }
    if (maxval != 255) v = (v * 255 + maxval / 2) / maxval;
    img.pixels[i] = static_cast<std::uint8_t>(v);
  }
  return img;
}

RasterImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_pnm(bytes);
  } catch (const FormatError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> gray) {
  if (gray.size() != width * height) {
    throw ShapeError("write_pgm: " + std::to_string(gray.size()) + " pixels for " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

Matrix gray_plane(const RasterImage& img) {
  Matrix plane(img.height, img.width);
  auto out = plane.data();
  if (img.channels == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.pixels[i];
  } else if (img.channels == 3) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = to_grayscale(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]);
    }
  } else {
    throw FormatError("unsupported channel count " + std::to_string(img.channels));
  }
  return plane;
}

Matrix resize(const Matrix& plane, std::size_t height, std::size_t width, ResizeFilter filter) {
  if (height == 0 || width == 0) throw ParameterError("resize: target dimensions must be >= 1");
  if (plane.empty()) throw ShapeError("resize: empty source image");
  const std::size_t src_h = plane.rows();
  const std::size_t src_w = plane.cols();
  if (src_h == height && src_w == width) return plane;

  const double sy = static_cast<double>(src_h) / static_cast<double>(height);
  const double sx = static_cast<double>(src_w) / static_cast<double>(width);
  Matrix out(height, width);

  if (filter == ResizeFilter::nearest) {
    for (std::size_t y = 0; y < height; ++y) {
      const auto yy = std::min(src_h - 1, static_cast<std::size_t>((y + 0.5) * sy));
      for (std::size_t x = 0; x < width; ++x) {
        const auto xx = std::min(src_w - 1, static_cast<std::size_t>((x + 0.5) * sx));
        out(y, x) = plane(yy, xx);
      }
    }
    return out;
  }

  auto coord = [](std::size_t dst, double ratio, std::size_t src_len, std::size_t& lo,
                  std::size_t& hi, double& frac) {
    double c = (static_cast<double>(dst) + 0.5) * ratio - 0.5;
    c = std::clamp(c, 0.0, static_cast<double>(src_len - 1));
    lo = static_cast<std::size_t>(c);
    hi = std::min(lo + 1, src_len - 1);
    frac = c - static_cast<double>(lo);
  };
  for (std::size_t y = 0; y < height; ++y) {
    std::size_t y0, y1;
    double fy;
    coord(y, sy, src_h, y0, y1, fy);
    for (std::size_t x = 0; x < width; ++x) {
      std::size_t x0, x1;
      double fx;
      coord(x, sx, src_w, x0, x1, fx);
      const double top = plane(y0, x0) + fx * (plane(y0, x1) - plane(y0, x0));
      const double bottom = plane(y1, x0) + fx * (plane(y1, x1) - plane(y1, x0));
      out(y, x) = top + fy * (bottom - top);
    }
  }
  return out;
}

Matrix preprocess(const RasterImage& img, const PreprocessConfig& cfg) {
  cfg.validate();
  const Matrix plane = resize(gray_plane(img), cfg.target_height, cfg.target_width, cfg.filter);
  Matrix row(1, plane.size());
  auto src = plane.data();
  auto dst = row.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::clamp(src[i] / 255.0, 0.0, 1.0);
  return row;
}

Matrix load_image(const std::filesystem::path& path, const PreprocessConfig& cfg) {
  return preprocess(read_pnm(path), cfg);
}

Matrix reshape(const Matrix& m, std::size_t rows, std::size_t cols) {
  if (rows * cols != m.size()) {
    throw ShapeError("reshape: cannot view " + m.shape() + " as " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  return Matrix(rows, cols, std::vector<double>(m.data().begin(), m.data().end()));
}

}  // namespace sae
