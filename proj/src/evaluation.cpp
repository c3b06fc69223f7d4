#include "sae/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sae/error.hpp"
#include "sae/image.hpp"

namespace sae {

ConfusionCounts confusion(std::span<const std::size_t> predicted,
                          std::span<const std::size_t> truth, std::size_t positive_class) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(truth.size()) + " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == positive_class;
    const bool flagged = predicted[i] == positive_class;
    if (actual && flagged) ++c.tp;
    else if (!actual && !flagged) ++c.tn;
    else if (flagged) ++c.fp;
    else ++c.fn;
  }
  return c;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string format_rate(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  const std::size_t total = c.total();
  if (total == 0) throw EvaluationError("no samples evaluated");
  Metrics m;
  const auto t = static_cast<double>(total);
  m.accuracy = static_cast<double>(c.tp + c.tn) / t;
  m.fp_rate_total = static_cast<double>(c.fp) / t;
  m.fn_rate_total = static_cast<double>(c.fn) / t;
  m.fp_rate_classwise = ratio(c.fp, c.fp + c.tn);
  m.fn_rate_classwise = ratio(c.fn, c.fn + c.tp);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  return m;
}

std::size_t positive_class_index(std::span<const std::string> class_names) {
  const auto it = std::find(class_names.begin(), class_names.end(), "defective");
  return it == class_names.end() ? 0 : static_cast<std::size_t>(it - class_names.begin());
}

std::string render_confusion(const ConfusionCounts& c, const std::string& positive_name,
                             const std::string& negative_name) {
  const std::string pos = "pred " + positive_name;
  const std::string neg = "pred " + negative_name;
  const std::string row_pos = "true " + positive_name;
  const std::string row_neg = "true " + negative_name;
  const std::size_t label_w = std::max(row_pos.size(), row_neg.size());
  const std::size_t col_w = std::max({pos.size(), neg.size(), std::to_string(c.total()).size()});

  auto pad = [](const std::string& s, std::size_t w, bool left) {
    const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
    return left ? s + fill : fill + s;
  };
  std::ostringstream out;
  out << pad("", label_w, true) << "  " << pad(pos, col_w, false) << "  " << pad(neg, col_w, false)
      << '\n';
  out << pad(row_pos, label_w, true) << "  " << pad(std::to_string(c.tp), col_w, false) << "  "
      << pad(std::to_string(c.fn), col_w, false) << '\n';
  out << pad(row_neg, label_w, true) << "  " << pad(std::to_string(c.fp), col_w, false) << "  "
      << pad(std::to_string(c.tn), col_w, false) << '\n';
  return out.str();
}

std::string render_metrics(const Metrics& m) {
  std::ostringstream out;
  out << "accuracy            " << format_rate(m.accuracy) << '\n'
      << "fp_rate_total       " << format_rate(m.fp_rate_total) << '\n'
      << "fn_rate_total       " << format_rate(m.fn_rate_total) << '\n'
      << "fp_rate_classwise   " << format_rate(m.fp_rate_classwise) << '\n'
      << "fn_rate_classwise   " << format_rate(m.fn_rate_classwise) << '\n'
      << "precision           " << format_rate(m.precision) << '\n'
      << "recall              " << format_rate(m.recall) << '\n';
  return out.str();
}

EvaluationReport evaluate(const StackedNetwork& net, const Matrix& features,
                          std::span<const std::size_t> truth,
                          std::span<const std::string> class_names) {
  if (class_names.size() != net.classes()) {
    throw ShapeError("model has " + std::to_string(net.classes()) + " classes, data has " +
                     std::to_string(class_names.size()));
  }
  const Prediction pred = predict(net, features);
  const std::size_t positive = positive_class_index(class_names);
  EvaluationReport report;
  report.counts = confusion(pred.labels, truth, positive);
  report.metrics = metrics(report.counts);
  // Two-class reports name the other class; with more, "negative" is the rest.
  const std::string negative = class_names.size() == 2 ? class_names[1 - positive] : "other";
  report.text = render_confusion(report.counts, class_names[positive], negative) + '\n' +
                render_metrics(report.metrics);
  return report;
}

void emit_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "phase,iteration,loss,train_accuracy,val_accuracy\n";
  for (const auto& p : trace) {
    out << p.phase << ',' << p.iteration << ',' << format_real(p.loss) << ','
        << (p.train_accuracy ? format_real(*p.train_accuracy) : "") << ','
        << (p.val_accuracy ? format_real(*p.val_accuracy) : "") << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

TrainingTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "phase,iteration,loss,train_accuracy,val_accuracy") {
    throw FormatError(path.string() + ": missing trace header");
  }
  TrainingTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 5 cells");
    }
    try {
      TracePoint p;
      p.phase = cells[0];
      p.iteration = std::stoull(cells[1]);
      p.loss = std::stod(cells[2]);
      if (!cells[3].empty()) p.train_accuracy = std::stod(cells[3]);
      if (!cells[4].empty()) p.val_accuracy = std::stod(cells[4]);
      trace.push_back(std::move(p));
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  return trace;
}

std::vector<std::uint8_t> weights_to_gray(std::span<const double> row) {
  std::vector<std::uint8_t> out(row.size(), 128);
  if (row.empty()) return out;
  const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  const double range = *hi - *lo;
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (row[i] - *lo) / range));
  }
  return out;
}

std::vector<std::filesystem::path> visualize_weights(
    const StackedNetwork& net, std::size_t layer, const std::filesystem::path& out_dir,
    std::optional<std::pair<std::size_t, std::size_t>> dims) {
  if (layer == 0 || layer > net.encoders.size()) {
    throw ParameterError("layer " + std::to_string(layer) + " out of range 1.." +
                         std::to_string(net.encoders.size()));
  }
  const AutoencoderParams& enc = net.encoders[layer - 1];
  const std::size_t n = enc.input_width();
  std::size_t height = 0;
  std::size_t width = 0;
  if (dims) {
    std::tie(height, width) = *dims;
    if (height * width != n) {
      throw ParameterError(std::to_string(height) + "x" + std::to_string(width) +
                           " does not match layer input width " + std::to_string(n));
    }
  } else {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) {
      throw ParameterError("layer input width " + std::to_string(n) +
                           " is not a perfect square; pass explicit dimensions");
    }
    height = width = side;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  for (std::size_t unit = 0; unit < enc.hidden_width(); ++unit) {
    const auto path = out_dir / ("weight_" + std::to_string(layer) + "_" + std::to_string(unit) + ".pgm");
    write_pgm(path, width, height, weights_to_gray(enc.w_enc.row(unit)));
    written.push_back(path);
  }
  return written;
}

}  // namespace sae
