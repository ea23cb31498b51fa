#include "shearlab/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace shearlab::checkpoint {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'H', 'L', 'F', 'L', 'D', '0', '1'};

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated record");
  return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  for (int n : f.grid().dims()) put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  os.write("xyz", 3);
  put<std::uint8_t>(os, 0);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.size()));
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

RealField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  int d[3];
  for (int& n : d) n = static_cast<int>(get<std::uint32_t>(is));
  char labels[3];
  is.read(labels, 3);
  if (!is || std::memcmp(labels, "xyz", 3) != 0) throw std::runtime_error("checkpoint: bad axis labels");
  (void)get<std::uint8_t>(is);
  const auto count = get<std::uint64_t>(is);
  Grid g(d[0], d[1], d[2]);
  if (count != g.size()) throw std::runtime_error("checkpoint: sample count does not match dims");
  std::vector<double> v(count);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint: truncated samples in " + path.string());
  return RealField(g, std::move(v));
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::json& meta) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  os << meta.dump(2) << '\n';
}

nlohmann::json read_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return nlohmann::json::parse(is);
}

const RealField& Bundle::field(const std::string& name) const {
  for (const auto& [n, f] : fields) {
    if (n == name) return f;
  }
  throw std::out_of_range("checkpoint bundle has no field '" + name + "'");
}

std::filesystem::path save_bundle(const std::filesystem::path& prefix, const Bundle& b) {
  nlohmann::json meta = b.meta;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, f] : b.fields) {
    std::filesystem::path p = prefix;
    p += "." + name + ".bin";
    write_field(p, f);
    files[name] = p.filename().string();
  }
  meta["fields"] = files;
  std::filesystem::path side = prefix;
  side += ".json";
  write_sidecar(side, meta);
  return side;
}

Bundle load_bundle(const std::filesystem::path& sidecar) {
  Bundle b;
  b.meta = read_sidecar(sidecar);
  const auto dir = sidecar.parent_path();
  for (const auto& [name, file] : b.meta.at("fields").items()) {
    b.fields.emplace_back(name, read_field(dir / file.get<std::string>()));
  }
  return b;
}

}  // namespace shearlab::checkpoint
