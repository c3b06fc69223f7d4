#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "sae/dataset.hpp"
#include "sae/error.hpp"
#include "sae/softmax.hpp"
#include "test_util.hpp"

namespace sae {
namespace {

namespace fs = std::filesystem;

void write_images(const fs::path& dir, std::size_t count, std::uint8_t shade) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img%03zu.pgm", i);
    std::vector<std::uint8_t> px(16, shade);
    px[i % 16] = static_cast<std::uint8_t>(i);
    write_pgm(dir / name, 4, 4, px);
  }
}

const PreprocessConfig kSmall{4, 4, ResizeFilter::bilinear};

std::size_t count_label(const Dataset& d, std::size_t label) {
  const auto l = d.label_indices();
  return static_cast<std::size_t>(std::count(l.begin(), l.end(), label));
}

TEST(LoadDirectoryTest, CountsAndOrdering) {
  test::TempDir root("data");
  write_images(root / "healthy", 2, 200);
  write_images(root / "defective", 3, 50);
  const Dataset d = load_directory(root.path(), kSmall);
  EXPECT_EQ(d.size(), 5u);
  EXPECT_EQ(d.classes(), 2u);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"defective", "healthy"}));
  EXPECT_EQ(d.label_indices(), (std::vector<std::size_t>{0, 0, 0, 1, 1}));
  EXPECT_NE(d.source_paths[0].find("defective/img000.pgm"), std::string::npos);
  EXPECT_NE(d.source_paths[4].find("healthy/img001.pgm"), std::string::npos);
  EXPECT_NO_THROW(d.validate());
}

TEST(LoadDirectoryTest, DeterministicAcrossLoads) {
  test::TempDir root("data");
  write_images(root / "a", 4, 10);
  write_images(root / "b", 3, 90);
  const Dataset x = load_directory(root.path(), kSmall);
  const Dataset y = load_directory(root.path(), kSmall);
  EXPECT_TRUE(bitwise_equal(x.features, y.features));
  EXPECT_TRUE(bitwise_equal(x.labels, y.labels));
  EXPECT_EQ(x.source_paths, y.source_paths);
}

TEST(LoadDirectoryTest, ReferenceCorpusShape) {
  test::TempDir root("data");
  write_images(root / "defective", 214, 60);
  write_images(root / "healthy", 91, 180);
  const Dataset d = load_directory(root.path(), kSmall);
  EXPECT_EQ(d.size(), 305u);
  EXPECT_EQ(count_label(d, 0), 214u);
  EXPECT_EQ(count_label(d, 1), 91u);
}

TEST(LoadDirectoryTest, MissingRootNamesPath) {
  try {
    load_directory("/nonexistent/data", kSmall);
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/data"), std::string::npos);
  }
}

TEST(LoadDirectoryTest, EmptyClassDirectoryIsError) {
  test::TempDir root("data");
  write_images(root / "a", 2, 10);
  fs::create_directories(root / "b");
  EXPECT_THROW(load_directory(root.path(), kSmall), IngestionError);
}

TEST(LoadDirectoryTest, ReportsEveryUnreadableFile) {
  test::TempDir root("data");
  write_images(root / "a", 2, 10);
  write_images(root / "b", 2, 10);
  std::ofstream(root / "a" / "broken.pgm") << "not an image";
  std::ofstream(root / "b" / "notes.txt") << "P7 hello";
  try {
    load_directory(root.path(), kSmall);
    FAIL();
  } catch (const IngestionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2 unreadable"), std::string::npos);
    EXPECT_NE(what.find("broken.pgm"), std::string::npos);
    EXPECT_NE(what.find("notes.txt"), std::string::npos);
  }
}

Dataset labeled(std::vector<std::size_t> counts) {
  Dataset d;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    d.class_names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < counts[c]; ++i) labels.push_back(c);
  }
  d.features = Matrix(labels.size(), 2);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    d.features(r, 0) = static_cast<double>(r) / static_cast<double>(labels.size());
    d.source_paths.push_back("s" + std::to_string(r));
  }
  d.labels = one_hot(labels, counts.size());
  return d;
}

TEST(SplitTest, OnePerClassOnTinyDataset) {
  const auto [train, val] = split(labeled({2, 2}), 0.5, 1);
  EXPECT_EQ(train.size(), 2u);
  EXPECT_EQ(val.size(), 2u);
  EXPECT_EQ(count_label(val, 0), 1u);
  EXPECT_EQ(count_label(val, 1), 1u);
}

TEST(SplitTest, ReferenceCorpusCounts) {
  const auto [train, val] = split(labeled({214, 91}), 0.2, 7);
  EXPECT_EQ(count_label(val, 0), 43u);  // round(42.8)
  EXPECT_EQ(count_label(val, 1), 18u);  // round(18.2)
  EXPECT_EQ(train.size(), 305u - 61u);
}

TEST(SplitTest, SameSeedSameSplit) {
  const Dataset d = labeled({30, 20});
  const auto a = split(d, 0.3, 5);
  const auto b = split(d, 0.3, 5);
  const auto c = split(d, 0.3, 6);
  EXPECT_EQ(a.second.source_paths, b.second.source_paths);
  EXPECT_NE(a.second.source_paths, c.second.source_paths);
}

TEST(SplitTest, DisjointCoverAndStratified) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<std::size_t> counts = {2 + rng.below(60), 2 + rng.below(60), 2 + rng.below(10)};
    const double fraction = rng.uniform(0.05, 0.95);
    const Dataset d = labeled(counts);
    const auto [train, val] = split(d, fraction, rng.next_u64());
    std::set<std::string> seen(train.source_paths.begin(), train.source_paths.end());
    for (const auto& p : val.source_paths) EXPECT_TRUE(seen.insert(p).second) << "overlap " << p;
    EXPECT_EQ(seen.size(), d.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double wanted = static_cast<double>(counts[c]) * fraction;
      EXPECT_LE(std::abs(static_cast<double>(count_label(val, c)) - wanted), 1.0);
      EXPECT_GE(count_label(train, c), 1u);
    }
  }
}

TEST(SplitTest, Errors) {
  EXPECT_THROW(split(labeled({1, 5}), 0.2, 1), SplitError);
  EXPECT_THROW(split(labeled({4, 5}), 0.0, 1), SplitError);
  EXPECT_THROW(split(labeled({4, 5}), 1.0, 1), SplitError);
}

TEST(SynthBlobsTest, NoiselessSamplesAreTemplates) {
  const Dataset d = synth_blobs(3, 8, 0.0, 1);
  EXPECT_EQ(d.width(), 64u);
  EXPECT_EQ(d.size(), 6u);
  for (std::size_t r = 1; r < 3; ++r) {
    EXPECT_TRUE(std::equal(d.features.row(r).begin(), d.features.row(r).end(), d.features.row(0).begin()));
    EXPECT_TRUE(std::equal(d.features.row(3 + r).begin(), d.features.row(3 + r).end(), d.features.row(3).begin()));
  }
  EXPECT_EQ(d.features(0, 0), 1.0);       // top-left lit for class 0
  EXPECT_EQ(d.features(0, 63), 0.0);
  EXPECT_EQ(d.features(3, 0), 0.0);
  EXPECT_EQ(d.features(3, 63), 1.0);      // bottom-right lit for class 1
  EXPECT_EQ(sum(Matrix(1, 64, std::vector<double>(d.features.row(0).begin(), d.features.row(0).end()))), 16.0);
  EXPECT_NO_THROW(d.validate());
}

TEST(SynthBlobsTest, DeterministicAndClipped) {
  const Dataset a = synth_blobs(10, 6, 0.5, 9);
  const Dataset b = synth_blobs(10, 6, 0.5, 9);
  EXPECT_TRUE(bitwise_equal(a.features, b.features));
  for (double v : a.features.data()) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(SynthBlobsTest, RejectsSmallSide) {
  EXPECT_THROW(synth_blobs(5, 3, 0.1, 1), ParameterError);
}

// Nearest class mean on raw pixels separates the corpus almost perfectly.
TEST(SynthBlobsTest, NearestCentroidOracle) {
  const Dataset d = synth_blobs(100, 16, 0.1, 21);
  const auto labels = d.label_indices();
  std::vector<std::vector<double>> centroid(2, std::vector<double>(d.width(), 0.0));
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t i = 0; i < d.width(); ++i) centroid[labels[r]][i] += d.features(r, i) / 100.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    double dist[2] = {0.0, 0.0};
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < d.width(); ++i) {
        const double diff = d.features(r, i) - centroid[c][i];
        dist[c] += diff * diff;
      }
    hits += (dist[1] < dist[0] ? 1u : 0u) == labels[r];
  }
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(d.size()), 0.99);
}

TEST(SynthBlobsTest, WrittenCorpusLoadsBack) {
  test::TempDir root("synth");
  const Dataset d = synth_blobs(4, 8, 0.0, 1);
  const auto files = write_dataset_images(d, 8, 8, root.path());
  EXPECT_EQ(files.size(), 8u);
  const Dataset back = load_directory(root.path(), PreprocessConfig{8, 8, ResizeFilter::bilinear});
  EXPECT_EQ(back.class_names, d.class_names);
  EXPECT_TRUE(bitwise_equal(back.features, d.features));  // noiseless pixels are exactly 0 or 1
  EXPECT_TRUE(bitwise_equal(back.labels, d.labels));
}

}  // namespace
}  // namespace sae
