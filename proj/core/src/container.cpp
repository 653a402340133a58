#include "ecp/container.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

constexpr std::array<char, 4> kMagic = {'E', 'C', 'P', 'D'};

template <typename T>
void put_le(std::vector<char>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(char((std::uint64_t(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::vector<char>& in, std::size_t off) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(std::uint8_t(in[off + i])) << (8 * i);
  return T(v);
}

}  // namespace

void write_container(const std::filesystem::path& path, const ImageSet& set, std::uint8_t mode,
                     std::uint64_t per_sample_seed) {
  std::vector<char> head(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(head, 1);
  put_le<std::uint32_t>(head, std::uint32_t(set.count()));
  put_le<std::uint8_t>(head, mode);
  put_le<std::uint8_t>(head, static_cast<std::uint8_t>(set.provenance()));
  put_le<std::uint16_t>(head, 0);
  put_le<std::uint64_t>(head, per_sample_seed);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(head.data(), std::streamsize(head.size()));
  out.write(reinterpret_cast<const char*>(set.pixels().data()), std::streamsize(set.pixels().size()));
  out.write(reinterpret_cast<const char*>(set.labels().data()), std::streamsize(set.count()));
  if (!out) throw Error(ErrorKind::io, "short write on " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kContainerHeaderBytes) throw Error(ErrorKind::io, path.string() + ": truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw Error(ErrorKind::format, path.string() + ": not an ECPD container");
  }
  Container c;
  c.header.version = get_le<std::uint32_t>(buf, 4);
  if (c.header.version != 1) {
    throw Error(ErrorKind::format, "unsupported container version " + std::to_string(c.header.version));
  }
  c.header.count = get_le<std::uint32_t>(buf, 8);
  c.header.mode = get_le<std::uint8_t>(buf, 12);
  const auto prov = get_le<std::uint8_t>(buf, 13);
  if (prov > 2) throw Error(ErrorKind::format, "unknown provenance code " + std::to_string(prov));
  c.header.provenance = static_cast<Provenance>(prov);
  c.header.per_sample_seed = get_le<std::uint64_t>(buf, 16);

  const std::size_t n = c.header.count;
  if (buf.size() != kContainerHeaderBytes + n * (kImageBytes + 1)) {
    throw Error(ErrorKind::io, path.string() + ": payload size does not match count " + std::to_string(n));
  }
  const auto* base = reinterpret_cast<const std::uint8_t*>(buf.data()) + kContainerHeaderBytes;
  std::vector<std::uint8_t> px(base, base + n * kImageBytes);
  std::vector<Label> labels(base + n * kImageBytes, base + n * (kImageBytes + 1));
  c.set = ImageSet(std::move(px), std::move(labels), c.header.provenance);
  return c;
}

}  // namespace ecp
