#include "sae/commands.hpp"

#include <cmath>
#include <fstream>

#include "sae/dataset.hpp"
#include "sae/gradcheck.hpp"

namespace fs = std::filesystem;

namespace sae::cli {

int exit_code_for(const Error& e) noexcept {
  const std::string& k = e.kind();
  if (k == "config" || k == "parameter") return kConfigError;
  if (k == "numeric") return kNumericError;
  return kDataError;
}

std::string error_line(const std::string& kind, int code, const std::string& message) {
  std::string flat;
  for (char c : message) {
    if (c == '\n' || c == '\r') flat += ' ';
    else if (c == '"') flat += "\\\"";
    else flat += c;
  }
  return "error kind=" + kind + " exit=" + std::to_string(code) + " message=\"" + flat + "\"";
}

fs::path classes_path(const fs::path& model_path) {
  fs::path p = model_path;
  p += ".classes";
  return p;
}

std::vector<std::string> read_class_names(const fs::path& model_path, std::size_t classes) {
  std::vector<std::string> names;
  std::ifstream in(classes_path(model_path));
  for (std::string line; in && std::getline(in, line);) {
    if (!line.empty()) names.push_back(line);
  }
  if (names.size() != classes) {
    names.clear();
    for (std::size_t c = 0; c < classes; ++c) names.push_back("class" + std::to_string(c));
  }
  return names;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

PreprocessConfig preprocess_for(const StackedNetwork& net, const std::optional<RunConfig>& cfg) {
  if (cfg) return cfg->preprocess();
  const std::size_t n = net.input_width();
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) {
    throw ConfigError("model input width " + std::to_string(n) +
                      " is not square; pass --config with the image dimensions");
  }
  return {side, side, ResizeFilter::bilinear};
}

void check_width(const StackedNetwork& net, const Dataset& data) {
  if (net.input_width() != data.width()) {
    throw ShapeError("model input width " + std::to_string(net.input_width()) +
                     " does not match data width " + std::to_string(data.width()));
  }
}

}  // namespace

TrainArtifacts cmd_train(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.data_dir.empty()) throw ConfigError("data_dir is required for train");
  const TrainConfig tc = cfg.train_config();
  tc.validate(cfg.layers.size() - 1);

  const Dataset data = load_directory(cfg.data_dir, cfg.preprocess());
  auto [train, val] = split(data, cfg.val_fraction, cfg.seed);
  out << "loaded " << data.size() << " images in " << data.classes() << " classes; train "
      << train.size() << ", val " << val.size() << '\n';

  TrainResult pre = pretrain(train, cfg.layers, tc, &val);
  TrainArtifacts art;
  art.val_accuracy_pretrain = accuracy(pre.net, val);
  TrainResult tuned = fine_tune(std::move(pre.net), train, tc, &val);
  TrainingTrace trace = std::move(pre.trace);
  trace.insert(trace.end(), tuned.trace.begin(), tuned.trace.end());

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.out_dir + ": " + ec.message());
  const fs::path dir = cfg.out_dir;
  art.model = dir / "model.saem";
  art.classes = classes_path(art.model);
  art.trace = dir / "trace.csv";
  art.report = dir / "report.txt";
  art.config = dir / "config.json";

  save_model(tuned.net, art.model);
  std::string names;
  for (const auto& n : data.class_names) names += n + '\n';
  write_text(art.classes, names);
  emit_trace_csv(trace, art.trace);
  write_text(art.config, cfg.to_json().dump(2) + '\n');

  art.val_report = evaluate(tuned.net, val.features, val.label_indices(), val.class_names);
  char line[96];
  std::snprintf(line, sizeof line, "validation accuracy after pretraining %.4f\n",
                art.val_accuracy_pretrain);
  const std::string report = std::string(line) + "validation split (" +
                             std::to_string(val.size()) + " samples)\n" + art.val_report.text;
  write_text(art.report, report);
  out << report << "model written to " << art.model.string() << '\n';
  return art;
}

Subset parse_subset(const std::string& name) {
  if (name == "all") return Subset::all;
  if (name == "train") return Subset::train;
  if (name == "val") return Subset::val;
  throw ConfigError("unknown subset '" + name + "' (expected all, train or val)");
}

EvaluationReport cmd_eval(const fs::path& model_path, const fs::path& data_dir,
                          const std::optional<RunConfig>& cfg, Subset subset, std::ostream& out) {
  if (cfg) cfg->validate();
  const StackedNetwork net = load_model(model_path);
  Dataset data = load_directory(data_dir, preprocess_for(net, cfg));
  check_width(net, data);
  if (subset != Subset::all) {
    const double fraction = cfg ? cfg->val_fraction : RunConfig{}.val_fraction;
    const std::uint64_t seed = cfg ? cfg->seed : RunConfig{}.seed;
    auto halves = split(data, fraction, seed);
    data = subset == Subset::train ? std::move(halves.first) : std::move(halves.second);
  }
  EvaluationReport report = evaluate(net, data.features, data.label_indices(), data.class_names);
  out << data.size() << " samples\n" << report.text;
  return report;
}

void cmd_predict(const fs::path& model_path, const std::vector<fs::path>& images,
                 const std::optional<RunConfig>& cfg, std::ostream& out) {
  if (cfg) cfg->validate();
  const StackedNetwork net = load_model(model_path);
  const PreprocessConfig pc = preprocess_for(net, cfg);
  const auto names = read_class_names(model_path, net.classes());
  for (const auto& path : images) {
    const Matrix x = load_image(path, pc);
    if (x.cols() != net.input_width()) {
      throw ShapeError("model input width " + std::to_string(net.input_width()) +
                       " does not match image width " + std::to_string(x.cols()));
    }
    const Prediction p = predict(net, x);
    out << path.string() << ' ' << names[p.labels[0]];
    for (std::size_t c = 0; c < net.classes(); ++c) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %s=%.6f", names[c].c_str(), p.probs(0, c));
      out << buf;
    }
    out << '\n';
  }
}

std::vector<fs::path> cmd_visualize(const fs::path& model_path, std::size_t layer,
                                    const fs::path& out_dir,
                                    std::optional<std::pair<std::size_t, std::size_t>> dims,
                                    std::ostream& out) {
  const StackedNetwork net = load_model(model_path);
  auto files = visualize_weights(net, layer, out_dir, dims);
  out << "wrote " << files.size() << " images to " << out_dir.string() << '\n';
  return files;
}

double cmd_gradcheck(std::uint64_t seed, std::size_t configurations, std::ostream& out) {
  const GradCheckReport reports[] = {
      check_autoencoder_gradients(seed, configurations),
      check_softmax_gradients(seed + 1, configurations),
      check_stack_gradients(seed + 2, configurations),
  };
  double worst = 0.0;
  for (const auto& r : reports) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s configurations=%zu max_relative_error=%.3e %s\n",
                  r.component.c_str(), r.configurations, r.max_relative_error,
                  r.max_relative_error <= kGradCheckTolerance ? "ok" : "FAIL");
    out << buf;
    worst = std::max(worst, r.max_relative_error);
  }
  return worst;
}

std::vector<fs::path> cmd_synth(const fs::path& out_dir, std::size_t per_class, std::size_t side,
                                double noise_sd, std::uint64_t seed, std::ostream& out) {
  const Dataset data = synth_blobs(per_class, side, noise_sd, seed);
  auto files = write_dataset_images(data, side, side, out_dir);
  out << "wrote " << files.size() << " images to " << out_dir.string() << '\n';
  return files;
}

}  // namespace sae::cli
