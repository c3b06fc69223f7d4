#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sae/image.hpp"
#include "sae/matrix.hpp"

namespace sae {

// Labeled images, one flattened image per row with pixels in [0, 1].
struct Dataset {
  Matrix features;  // samples x width
  Matrix labels;    // samples x classes, one-hot
  std::vector<std::string> class_names;
  std::vector<std::string> source_paths;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t width() const noexcept { return features.cols(); }
  std::size_t classes() const noexcept { return class_names.size(); }
  std::vector<std::size_t> label_indices() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  // Throws ShapeError on any broken invariant.
  void validate() const;
};

// root/<class>/<image>; classes and files in lexicographic order. Every
// unreadable file is reported in one IngestionError.
Dataset load_directory(const std::filesystem::path& root, const PreprocessConfig& cfg);

// Stratified split. Each class contributes round(count * val_fraction)
// samples to validation, clamped to [1, count - 1], chosen by a seeded
// shuffle. Both halves keep the original row order.
std::pair<Dataset, Dataset> split(const Dataset& data, double val_fraction, std::uint64_t seed);

// Two-class synthetic corpus: class 0 ("defective") is a bright square in the
// top-left quadrant, class 1 ("healthy") one in the bottom-right, plus
// Gaussian pixel noise clipped to [0, 1]. Rows are grouped by class.
Dataset synth_blobs(std::size_t samples_per_class, std::size_t side, double noise_sd,
                    std::uint64_t seed);

// Writes each sample as an 8-bit PGM under out_dir/<class>/<index>.pgm.
std::vector<std::filesystem::path> write_dataset_images(const Dataset& data, std::size_t height,
                                                        std::size_t width,
                                                        const std::filesystem::path& out_dir);

}  // namespace sae
