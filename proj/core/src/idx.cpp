#include "ecp/idx.hpp"

#include <fstream>
#include <string>

#include <zlib.h>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t off) {
  return (std::uint32_t(buf[off]) << 24) | (std::uint32_t(buf[off + 1]) << 16) |
         (std::uint32_t(buf[off + 2]) << 8) | std::uint32_t(buf[off + 3]);
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
  out.write(b, 4);
}

}  // namespace

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::io, "no such file: " + path.string());
  }
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  for (;;) {
    const int n = gzread(f, chunk, sizeof(chunk));
    if (n < 0) {
      int errnum = 0;
      std::string msg = gzerror(f, &errnum);
      gzclose(f);
      throw Error(ErrorKind::io, path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk, chunk + n);
  }
  // Z_BUF_ERROR on close means the gzip stream ended early.
  if (gzclose(f) != Z_OK) {
    throw Error(ErrorKind::io, path.string() + ": truncated compressed stream");
  }
  return out;
}

ImageSet load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path) {
  const auto img = read_maybe_gzip(images_path);
  const auto lab = read_maybe_gzip(labels_path);

  if (img.size() < 16) throw Error(ErrorKind::io, images_path.string() + ": truncated header");
  if (lab.size() < 8) throw Error(ErrorKind::io, labels_path.string() + ": truncated header");

  if (const auto m = read_be32(img, 0); m != kIdxImageMagic) {
    throw Error(ErrorKind::format, images_path.string() + ": bad image magic " + std::to_string(m));
  }
  if (const auto m = read_be32(lab, 0); m != kIdxLabelMagic) {
    throw Error(ErrorKind::format, labels_path.string() + ": bad label magic " + std::to_string(m));
  }
  const std::uint32_t n_images = read_be32(img, 4);
  const std::uint32_t rows = read_be32(img, 8);
  const std::uint32_t cols = read_be32(img, 12);
  const std::uint32_t n_labels = read_be32(lab, 4);
  if (rows != kImageRows || cols != kImageCols) {
    throw Error(ErrorKind::format, images_path.string() + ": expected 28x28 images, got " +
                                       std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (n_images != n_labels) {
    throw Error(ErrorKind::consistency, std::to_string(n_images) + " images vs " +
                                            std::to_string(n_labels) + " labels");
  }
  const std::size_t n = n_images;
  if (img.size() < 16 + n * kImageBytes) {
    throw Error(ErrorKind::io, images_path.string() + ": truncated image data");
  }
  if (lab.size() < 8 + n) throw Error(ErrorKind::io, labels_path.string() + ": truncated label data");

  std::vector<std::uint8_t> pixels(img.begin() + 16, img.begin() + 16 + std::ptrdiff_t(n * kImageBytes));
  std::vector<Label> labels(lab.begin() + 8, lab.begin() + 8 + std::ptrdiff_t(n));
  return ImageSet(std::move(pixels), std::move(labels), Provenance::plaintext);
}

void write_idx(const ImageSet& set, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw Error(ErrorKind::io, "cannot create IDX output files");
  put_be32(img, kIdxImageMagic);
  put_be32(img, std::uint32_t(set.count()));
  put_be32(img, kImageRows);
  put_be32(img, kImageCols);
  img.write(reinterpret_cast<const char*>(set.pixels().data()), std::streamsize(set.pixels().size()));
  put_be32(lab, kIdxLabelMagic);
  put_be32(lab, std::uint32_t(set.count()));
  lab.write(reinterpret_cast<const char*>(set.labels().data()), std::streamsize(set.count()));
  if (!img || !lab) throw Error(ErrorKind::io, "short write on IDX output");
}

MnistFiles locate_mnist(const std::filesystem::path& dir) {
  auto pick = [&dir](const char* stem) {
    const auto raw = dir / stem;
    if (std::filesystem::exists(raw)) return raw;
    auto gz = dir / (std::string(stem) + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw Error(ErrorKind::io, "missing MNIST file " + raw.string() + "[.gz]");
  };
  return {pick("train-images-idx3-ubyte"), pick("train-labels-idx1-ubyte"),
          pick("t10k-images-idx3-ubyte"), pick("t10k-labels-idx1-ubyte")};
}

}  // namespace ecp
