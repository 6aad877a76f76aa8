#pragma once

#include "nirb/reference.hpp"
#include "nirb/reduced_basis.hpp"

#include <json.hpp>

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace nirb {

/// One stored array with its JSON header.
struct Record {
  std::string id;
  nlohmann::json header;
  std::vector<double> payload;
};

struct ManifestEntry {
  std::string id;
  std::string file;
  std::uint32_t checksum = 0;
  std::uint64_t values = 0;
  nlohmann::json header;
};

/// Directory of binary records plus a manifest.json index.
///
/// File layout: "NIRBREC1", u32 header length, header JSON, u64 value count,
/// float64 values (little-endian), u32 CRC-32 of everything before it.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return dir_; }

  void save(const Record& record);
  Record load(const std::string& id) const;
  bool contains(const std::string& id) const;
  bool remove(const std::string& id);
  std::vector<ManifestEntry> list() const;

 private:
  nlohmann::json read_manifest() const;
  void write_manifest(const nlohmann::json& manifest) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

Record encode_trajectory(const std::string& id, const Trajectory& trajectory, nlohmann::json header = {});
Trajectory decode_trajectory(const Record& record);

Record encode_compressed(const std::string& id, const CompressedReference& ref, nlohmann::json header = {});
CompressedReference decode_compressed(const Record& record);

Record encode_matrix(const std::string& id, const Matrix& m, nlohmann::json header = {});
Matrix decode_matrix(const Record& record);

}  // namespace nirb
