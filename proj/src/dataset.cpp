#include "sae/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "sae/error.hpp"
#include "sae/rng.hpp"
#include "sae/softmax.hpp"

namespace fs = std::filesystem;

namespace sae {

std::vector<std::size_t> Dataset::label_indices() const { return argmax_rows(labels); }

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = gather_rows(features, rows);
  out.labels = gather_rows(labels, rows);
  out.class_names = class_names;
  out.source_paths.reserve(rows.size());
  for (std::size_t r : rows) out.source_paths.push_back(source_paths.at(r));
  return out;
}

void Dataset::validate() const {
  if (labels.rows() != features.rows() || source_paths.size() != features.rows()) {
    throw ShapeError("dataset row counts disagree: features " + features.shape() + ", labels " +
                     labels.shape() + ", " + std::to_string(source_paths.size()) + " paths");
  }
  if (labels.cols() != class_names.size()) {
    throw ShapeError("dataset has " + std::to_string(class_names.size()) +
                     " class names but labels " + labels.shape());
  }
  for (double v : features.data()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ShapeError("dataset feature outside [0, 1]");
  }
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    std::size_t ones = 0;
    for (double v : labels.row(r)) {
      if (v == 1.0) ++ones;
      else if (v != 0.0) throw ShapeError("label row " + std::to_string(r) + " is not one-hot");
    }
    if (ones != 1) throw ShapeError("label row " + std::to_string(r) + " is not one-hot");
  }
}

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (directories ? entry.is_directory() : entry.is_regular_file()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

}  // namespace

Dataset load_directory(const fs::path& root, const PreprocessConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IngestionError("data directory not found: " + root.string());

  const auto class_dirs = sorted_entries(root, true);
  if (class_dirs.size() < 2) {
    throw IngestionError(root.string() + ": need at least 2 class subdirectories, found " +
                         std::to_string(class_dirs.size()));
  }

  Dataset data;
  std::vector<fs::path> files;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    data.class_names.push_back(class_dirs[c].filename().string());
    const auto class_files = sorted_entries(class_dirs[c], false);
    if (class_files.empty()) throw IngestionError("empty class directory: " + class_dirs[c].string());
    for (const auto& f : class_files) {
      files.push_back(f);
      labels.push_back(c);
    }
  }

  const std::size_t width = cfg.flat_width();
  data.features = Matrix(files.size(), width);
  std::vector<std::optional<std::string>> errors(files.size());
  const auto count = static_cast<std::int64_t>(files.size());
  // Each file fills its own row, so completion order does not matter.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      const Matrix row = load_image(files[i], cfg);
      std::copy(row.data().begin(), row.data().end(), data.features.row(i).begin());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::string failures;
  std::size_t failed = 0;
  for (const auto& e : errors) {
    if (e) {
      ++failed;
      failures += "; " + *e;
    }
  }
  if (failed > 0) {
    throw IngestionError(std::to_string(failed) + " unreadable file(s) under " + root.string() +
                         failures);
  }

  data.labels = one_hot(labels, data.class_names.size());
  for (const auto& f : files) data.source_paths.push_back(f.string());
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw SplitError("validation fraction must lie in (0, 1)");
  }
  const auto labels = data.label_indices();
  std::vector<std::vector<std::size_t>> by_class(data.classes());
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<bool> in_val(data.size(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.size() < 2) {
      throw SplitError("class '" + data.class_names[c] + "' has " + std::to_string(rows.size()) +
                       " sample(s); need at least 2 to split");
    }
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * val_fraction));
    take = std::clamp<std::size_t>(take, 1, rows.size() - 1);
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t i = 0; i < take; ++i) in_val[rows[i]] = true;
  }

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
  for (std::size_t i = 0; i < data.size(); ++i) (in_val[i] ? val_rows : train_rows).push_back(i);
  return {data.subset(train_rows), data.subset(val_rows)};
}

Dataset synth_blobs(std::size_t samples_per_class, std::size_t side, double noise_sd,
                    std::uint64_t seed) {
  if (side < 4) throw ParameterError("synth_blobs: side must be >= 4");
  if (samples_per_class == 0) throw ParameterError("synth_blobs: need at least 1 sample per class");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw ParameterError("synth_blobs: noise_sd must be >= 0");
  }

  const std::size_t half = side / 2;
  std::array<Matrix, 2> templates = {Matrix(side, side), Matrix(side, side)};
  for (std::size_t y = 0; y < half; ++y) {
    for (std::size_t x = 0; x < half; ++x) {
      templates[0](y, x) = 1.0;
      templates[1](side - 1 - y, side - 1 - x) = 1.0;
    }
  }

  Rng rng(seed);
  Dataset data;
  data.class_names = {"defective", "healthy"};
  data.features = Matrix(2 * samples_per_class, side * side);
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      const std::size_t row = c * samples_per_class + s;
      auto dst = data.features.row(row);
      auto src = templates[c].data();
      for (std::size_t i = 0; i < dst.size(); ++i) {
        const double noise = noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0;
        dst[i] = std::clamp(src[i] + noise, 0.0, 1.0);
      }
      labels.push_back(c);
      data.source_paths.push_back("synth:" + data.class_names[c] + ":" + std::to_string(s));
    }
  }
  data.labels = one_hot(labels, 2);
  return data;
}

std::vector<fs::path> write_dataset_images(const Dataset& data, std::size_t height,
                                           std::size_t width, const fs::path& out_dir) {
  if (height * width != data.width()) {
    throw ShapeError("cannot write width-" + std::to_string(data.width()) + " samples as " +
                     std::to_string(height) + "x" + std::to_string(width) + " images");
  }
  const auto labels = data.label_indices();
  std::vector<std::size_t> per_class(data.classes(), 0);
  std::vector<fs::path> written;
  for (const auto& name : data.class_names) {
    std::error_code ec;
    fs::create_directories(out_dir / name, ec);
    if (ec) throw IoError("cannot create " + (out_dir / name).string() + ": " + ec.message());
  }
  std::vector<std::uint8_t> gray(data.width());
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.features.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      gray[i] = static_cast<std::uint8_t>(std::lround(std::clamp(row[i], 0.0, 1.0) * 255.0));
    }
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.pgm", per_class[labels[r]]++);
    const fs::path path = out_dir / data.class_names[labels[r]] / name;
    write_pgm(path, width, height, gray);
    written.push_back(path);
  }
  return written;
}

}  // namespace sae
