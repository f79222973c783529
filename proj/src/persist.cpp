#include "pinlab/persist.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pinlab {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[(size_t)i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

RunDir::RunDir(const std::filesystem::path& root, const std::string& name) {
  dir_ = root / name;
  std::filesystem::create_directories(dir_);
}

void RunDir::write_text(const std::string& name, std::string_view content) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + (dir_ / name).string());
  out.write(content.data(), (std::streamsize)content.size());
  out.close();
  entries_.push_back({name, content.size(), hex64(fnv1a(content))});
}

void RunDir::write_json(const std::string& name, const nlohmann::json& j) {
  write_text(name, j.dump(2) + "\n");
}

void RunDir::track(const std::string& name) {
  std::ifstream in(dir_ / name, std::ios::binary);
  if (!in) throw std::runtime_error("missing artifact " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  entries_.push_back({name, content.size(), hex64(fnv1a(content))});
}

void RunDir::write_manifest() {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : entries_) {
    files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"fnv64", e.checksum}});
  }
  nlohmann::json m{{"artifacts", files}};
  std::string body = m.dump(2) + "\n";
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out.write(body.data(), (std::streamsize)body.size());
}

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'L', 'A', 'W', 'T', 'B', 'L', '1'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return bool(in);
}

}  // namespace

void save_law_cache(const std::filesystem::path& file, const Law& law) {
  LawTableCache c = law.export_cache();
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string());
  out.write(kMagic.data(), kMagic.size());
  put(out, fnv1a(law.spec().id()));
  put(out, (std::uint64_t)c.table.size());
  put(out, c.c);
  put(out, c.log_c);
  put(out, c.mass.lo);
  put(out, c.mass.hi);
  put(out, c.norm_cutoff);
  put(out, c.tail_at_cutoff.lo);
  put(out, c.tail_at_cutoff.hi);
  out.write(reinterpret_cast<const char*>(c.table.data()),
            (std::streamsize)(c.table.size() * sizeof(double)));
}

std::optional<LawTableCache> load_law_cache(const std::filesystem::path& file,
                                            const LawSpec& spec) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) return std::nullopt;
  std::uint64_t id_hash = 0, n = 0;
  if (!get(in, id_hash) || id_hash != fnv1a(spec.id())) return std::nullopt;
  if (!get(in, n) || n != spec.n_max) return std::nullopt;
  LawTableCache c;
  if (!get(in, c.c) || !get(in, c.log_c) || !get(in, c.mass.lo) ||
      !get(in, c.mass.hi) || !get(in, c.norm_cutoff) ||
      !get(in, c.tail_at_cutoff.lo) || !get(in, c.tail_at_cutoff.hi))
    return std::nullopt;
  c.table.resize(n);
  in.read(reinterpret_cast<char*>(c.table.data()),
          (std::streamsize)(n * sizeof(double)));
  if (!in) return std::nullopt;
  return c;
}

}  // namespace pinlab
