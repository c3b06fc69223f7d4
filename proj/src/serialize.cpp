#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "sae/error.hpp"
#include "sae/network.hpp"

namespace sae {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'A', 'E', 'M'};

class Writer {
 public:
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void matrix(const Matrix& m) {
    for (double v : m.data()) f64(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("model format error at offset " + std::to_string(pos_) + ": " + what);
  }

  void need(std::size_t count, const char* what) const {
    if (remaining() < count) {
      fail(std::string("truncated while reading ") + what + " (need " +
           std::to_string(count) + " bytes, have " + std::to_string(remaining()) + ")");
    }
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  Matrix matrix(std::uint64_t rows, std::uint64_t cols, const char* what) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max() / 8;
    if (cols != 0 && rows > kMax / cols) fail(std::string("dimension overflow in ") + what);
    need(static_cast<std::size_t>(rows * cols * 8), what);
    Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (double& v : m.data()) v = f64(what);
    return m;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const StackedNetwork& net) {
  net.validate();
  Writer w;
  w.bytes(kMagic);
  w.u32(kModelFormatVersion);
  w.u64(net.encoders.size());
  for (const auto& e : net.encoders) {
    w.u64(e.input_width());
    w.u64(e.hidden_width());
    w.matrix(e.w_enc);
    w.matrix(e.b_hidden);
    w.matrix(e.w_dec);
    w.matrix(e.b_out);
  }
  w.u64(net.head.classes());
  w.u64(net.head.input_width());
  w.matrix(net.head.w);
  w.matrix(net.head.b);
  for (const auto& s : net.sparsity) {
    w.f64(s.rho);
    w.f64(s.beta);
    w.f64(s.lambda);
  }
  w.f64(net.head.lambda);
  return w.take();
}

StackedNetwork deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (bytes[i] != kMagic[i]) {
      throw FormatError("model format error at offset " + std::to_string(i) + ": bad magic");
    }
  }
  r.u32("magic");
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kModelFormatVersion) {
    throw FormatError("model format error at offset " + std::to_string(version_at) +
                      ": unsupported version " + std::to_string(version));
  }
  const std::uint64_t layers = r.u64("layer count");
  if (layers == 0 || layers > r.remaining() / 16) r.fail("implausible layer count");

  StackedNetwork net;
  for (std::uint64_t l = 0; l < layers; ++l) {
    const std::uint64_t n = r.u64("layer n");
    const std::uint64_t m = r.u64("layer m");
    AutoencoderParams p;
    p.w_enc = r.matrix(m, n, "w_enc");
    p.b_hidden = r.matrix(m, 1, "b_hidden");
    p.w_dec = r.matrix(n, m, "w_dec");
    p.b_out = r.matrix(n, 1, "b_out");
    net.encoders.push_back(std::move(p));
  }
  const std::uint64_t k = r.u64("head k");
  const std::uint64_t d = r.u64("head d");
  net.head.w = r.matrix(k, d, "head w");
  net.head.b = r.matrix(k, 1, "head b");
  for (std::uint64_t l = 0; l < layers; ++l) {
    SparsityConfig s;
    s.rho = r.f64("rho");
    s.beta = r.f64("beta");
    s.lambda = r.f64("lambda");
    net.sparsity.push_back(s);
  }
  net.head.lambda = r.f64("head lambda");
  if (r.remaining() != 0) r.fail(std::to_string(r.remaining()) + " trailing bytes");
  try {
    net.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("model format error: inconsistent contents: ") + e.what());
  }
  return net;
}

std::size_t serialized_size(std::span<const std::size_t> widths, std::size_t classes) {
  validate_layer_sizes(widths, classes);
  const std::size_t layers = widths.size() - 1;
  std::size_t bytes = 4 + 4 + 8;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t n = widths[l];
    const std::size_t m = widths[l + 1];
    bytes += 16 + 8 * (m * n + m + n * m + n);
  }
  bytes += 16 + 8 * (classes * widths.back() + classes);
  bytes += 8 * (3 * layers + 1);
  return bytes;
}

void save_model(const StackedNetwork& net, const std::filesystem::path& path) {
  const auto bytes = serialize(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

StackedNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace sae
