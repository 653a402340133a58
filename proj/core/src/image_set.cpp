#include "ecp/image_set.hpp"

#include <algorithm>
#include <string>

#include "ecp/errors.hpp"

namespace ecp {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::plaintext: return "plaintext";
    case Provenance::encrypted_fixed: return "encrypted_fixed";
    case Provenance::encrypted_per_sample: return "encrypted_per_sample";
  }
  return "unknown";
}

ImageSet::ImageSet(std::vector<std::uint8_t> pixels, std::vector<Label> labels,
                   Provenance provenance)
    : pixels_(std::move(pixels)), labels_(std::move(labels)), provenance_(provenance) {
  if (pixels_.size() != labels_.size() * kImageBytes) {
    throw Error(ErrorKind::consistency,
                "pixel buffer holds " + std::to_string(pixels_.size()) + " bytes for " +
                    std::to_string(labels_.size()) + " labels");
  }
  const auto bad = std::find_if(labels_.begin(), labels_.end(),
                                [](Label l) { return l >= kNumClasses; });
  if (bad != labels_.end()) {
    throw Error(ErrorKind::consistency, "label " + std::to_string(int(*bad)) + " outside 0..9");
  }
}

ImageSet ImageSet::subset(std::span<const std::size_t> indices) const {
  std::vector<std::uint8_t> px;
  std::vector<Label> lb;
  px.reserve(indices.size() * kImageBytes);
  lb.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= count()) throw Error(ErrorKind::index, "subset index out of range");
    const auto img = image(idx);
    px.insert(px.end(), img.begin(), img.end());
    lb.push_back(labels_[idx]);
  }
  return ImageSet(std::move(px), std::move(lb), provenance_);
}

ImageSet ImageSet::head(std::size_t n) const {
  n = std::min(n, count());
  return ImageSet(std::vector<std::uint8_t>(pixels_.begin(), pixels_.begin() + n * kImageBytes),
                  std::vector<Label>(labels_.begin(), labels_.begin() + n), provenance_);
}

std::uint64_t ImageSet::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  feed(static_cast<std::uint8_t>(provenance_));
  for (Label l : labels_) feed(l);
  for (std::uint8_t b : pixels_) feed(b);
  return h;
}

std::vector<float> normalize(std::span<const std::uint8_t> image) {
  std::vector<float> out(image.size());
  std::transform(image.begin(), image.end(), out.begin(), normalize_byte);
  return out;
}

Eigen::MatrixXf normalize_columns(const ImageSet& set) {
  Eigen::MatrixXf out(kImageBytes, Eigen::Index(set.count()));
  const auto px = set.pixels();
  float* dst = out.data();
  for (std::size_t i = 0; i < px.size(); ++i) dst[i] = normalize_byte(px[i]);
  return out;
}

}  // namespace ecp
