#pragma once

#include <cstdint>
#include <filesystem>

#include "ecp/image_set.hpp"

namespace ecp {

// Dataset container, all header integers little-endian:
//
//   offset  size  field
//   0       4     magic "ECPD"
//   4       4     version (1)
//   8       4     count
//   12      1     cipher mode (0 fixed, 1 per_sample, 0xff not encrypted)
//   13      1     provenance (0 plaintext, 1 encrypted_fixed, 2 encrypted_per_sample)
//   14      2     reserved, zero
//   16      8     per-sample key seed (0 unless mode is per_sample)
//   24      784*count  image records
//   ...     count      label bytes
struct ContainerHeader {
  std::uint32_t version = 1;
  std::uint32_t count = 0;
  std::uint8_t mode = 0xff;
  Provenance provenance = Provenance::plaintext;
  std::uint64_t per_sample_seed = 0;
};

inline constexpr std::size_t kContainerHeaderBytes = 24;

void write_container(const std::filesystem::path& path, const ImageSet& set,
                     std::uint8_t mode, std::uint64_t per_sample_seed = 0);

struct Container {
  ContainerHeader header;
  ImageSet set;
};

Container read_container(const std::filesystem::path& path);

}  // namespace ecp
