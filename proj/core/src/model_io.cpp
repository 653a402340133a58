#include "ecp/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(char(v)); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void raw(const void* p, std::size_t n) {
    const char* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}
  void raw(void* p, std::size_t n) {
    if (pos_ + n > buf_.size()) throw Error(ErrorKind::io, "model file truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  Writer w;
  w.raw("ECPM", 4);
  w.u32(1);
  const auto& arch = model.architecture();
  w.u32(std::uint32_t(arch.arch_id.size()));
  w.raw(arch.arch_id.data(), arch.arch_id.size());
  w.u32(std::uint32_t(arch.dims.size()));
  for (auto d : arch.dims) w.u32(std::uint32_t(d));
  for (const auto& l : model.layers()) w.u8(static_cast<std::uint8_t>(l.activation));
  w.u64(model.train_seed());
  for (const auto& l : model.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.f32(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.f32(l.bias(r));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(w.bytes().data(), std::streamsize(w.bytes().size()));
  if (!out) throw Error(ErrorKind::io, "short write on " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  Reader r(std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "ECPM", 4) != 0) throw Error(ErrorKind::format, path.string() + ": not a model file");
  if (const auto v = r.u32(); v != 1) throw Error(ErrorKind::format, "unsupported model version " + std::to_string(v));
  Architecture arch;
  arch.arch_id.resize(r.u32());
  r.raw(arch.arch_id.data(), arch.arch_id.size());
  const std::uint32_t n_dims = r.u32();
  if (n_dims < 2 || n_dims > 64) throw Error(ErrorKind::format, "implausible layer count");
  for (std::uint32_t i = 0; i < n_dims; ++i) arch.dims.push_back(r.u32());
  std::vector<Activation> acts;
  for (std::uint32_t i = 0; i + 1 < n_dims; ++i) {
    const auto a = r.u8();
    if (a > 1) throw Error(ErrorKind::format, "unknown activation code");
    acts.push_back(static_cast<Activation>(a));
  }
  const std::uint64_t seed = r.u64();
  std::vector<DenseLayer<float>> layers;
  for (std::uint32_t i = 0; i + 1 < n_dims; ++i) {
    DenseLayer<float> l;
    l.weight.resize(Eigen::Index(arch.dims[i + 1]), Eigen::Index(arch.dims[i]));
    l.bias.resize(Eigen::Index(arch.dims[i + 1]));
    for (Eigen::Index row = 0; row < l.weight.rows(); ++row)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) r.raw(&l.weight(row, c), 4);
    for (Eigen::Index row = 0; row < l.bias.size(); ++row) r.raw(&l.bias(row), 4);
    l.activation = acts[i];
    layers.push_back(std::move(l));
  }
  if (!r.at_end()) throw Error(ErrorKind::format, path.string() + ": trailing bytes");
  return MlpModel(std::move(arch), std::move(layers), seed);
}

}  // namespace ecp
