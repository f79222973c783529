#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pinlab/kernels.hpp"

namespace pinlab {

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

// artifact directory of a single run; everything written through it lands
// in the manifest with size and checksum
class RunDir {
 public:
  RunDir(const std::filesystem::path& root, const std::string& name);
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const {
    return dir_ / name;
  }
  void write_text(const std::string& name, std::string_view content);
  void write_json(const std::string& name, const nlohmann::json& j);
  // registers a file written directly (e.g. binary caches)
  void track(const std::string& name);
  void write_manifest();

 private:
  struct Entry {
    std::string name;
    std::uint64_t bytes = 0;
    std::string checksum;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

// binary snapshot of a law table, keyed by the spec; round-trips bit-exactly
void save_law_cache(const std::filesystem::path& file, const Law& law);
std::optional<LawTableCache> load_law_cache(const std::filesystem::path& file,
                                            const LawSpec& spec);

}  // namespace pinlab
