#pragma once

#include <filesystem>
#include <charconv>
#include <optional>
#include <type_traits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecp {

// Ordered key=value text record. Lines starting with '#' are comments.
class Manifest {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }
  void set(std::string key, std::string_view value) { set(std::move(key), std::string(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }
  template <typename T>
  void set(std::string key, const T& value) {
    if constexpr (std::is_floating_point_v<T>) {
      char buf[64];
      const auto r = std::to_chars(buf, buf + sizeof buf, value);  // shortest round-trip form
      set(std::move(key), std::string(buf, r.ptr));
    } else {
      std::ostringstream os;
      os << value;
      set(std::move(key), os.str());
    }
  }

  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

  static Manifest parse(std::string_view text);
  static Manifest read(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string hex64(std::uint64_t v);

}  // namespace ecp
