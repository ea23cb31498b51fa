#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "shearlab/field.hpp"

namespace shearlab::checkpoint {

/// Binary field record:
///   8 bytes  magic "SHLFLD01"
///   3 x u32  dims (nx, ny, nz), little-endian
///   3 bytes  axis labels "xyz"
///   1 byte   padding (0)
///   u64      sample count
///   f64[]    row-major samples (z fastest), little-endian IEEE-754
void write_field(const std::filesystem::path& path, const RealField& f);
RealField read_field(const std::filesystem::path& path);

/// JSON metadata stored next to a field or a set of fields.
void write_sidecar(const std::filesystem::path& path, const nlohmann::json& meta);
nlohmann::json read_sidecar(const std::filesystem::path& path);

/// A named set of fields plus metadata. Fields go to `<prefix>.<name>.bin`,
/// metadata (including the field file names) to `<prefix>.json`.
struct Bundle {
  std::vector<std::pair<std::string, RealField>> fields;
  nlohmann::json meta;

  const RealField& field(const std::string& name) const;
};

std::filesystem::path save_bundle(const std::filesystem::path& prefix, const Bundle& b);
Bundle load_bundle(const std::filesystem::path& sidecar);

}  // namespace shearlab::checkpoint
