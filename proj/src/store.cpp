#include "nirb/store.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace nirb {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'N', 'I', 'R', 'B', 'R', 'E', 'C', '1'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <typename T>
void append(std::string& buf, T v) {
  v = to_little(v);
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const std::string& buf, size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw StoreError("store: truncated record");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return to_little(v);
}

std::uint32_t crc_of(const std::string& bytes, size_t length) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(length));
  return static_cast<std::uint32_t>(crc);
}

std::string file_name_for(const std::string& id) {
  std::string name;
  for (char c : id) name += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_') ? c : '_';
  // Different ids can sanitize to the same name; a hash suffix keeps them apart.
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "-%08x", static_cast<unsigned>(crc_of(id, id.size())));
  return name + suffix + ".rec";
}

}  // namespace

SnapshotStore::SnapshotStore(fs::path directory) : dir_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw StoreError("store: cannot create " + dir_.string() + ": " + ec.message());
}

nlohmann::json SnapshotStore::read_manifest() const {
  const fs::path path = dir_ / "manifest.json";
  if (!fs::exists(path)) return nlohmann::json{{"records", nlohmann::json::object()}};
  std::ifstream in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("store: unreadable manifest: ") + e.what());
  }
}

void SnapshotStore::write_manifest(const nlohmann::json& manifest) const {
  const fs::path tmp = dir_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    out << manifest.dump(1);
    if (!out) throw StoreError("store: cannot write manifest");
  }
  fs::rename(tmp, dir_ / "manifest.json");
}

void SnapshotStore::save(const Record& record) {
  const std::string header = record.header.dump();
  std::string buf(kMagic, sizeof kMagic);
  append<std::uint32_t>(buf, static_cast<std::uint32_t>(header.size()));
  buf += header;
  append<std::uint64_t>(buf, record.payload.size());
  for (double v : record.payload) append<double>(buf, v);
  const std::uint32_t crc = crc_of(buf, buf.size());
  append<std::uint32_t>(buf, crc);

  const std::string file = file_name_for(record.id);
  const fs::path tmp = dir_ / (file + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw StoreError("store: cannot write " + tmp.string());
  }
  std::lock_guard<std::mutex> lock(mutex_);
  fs::rename(tmp, dir_ / file);
  nlohmann::json manifest = read_manifest();
  manifest["records"][record.id] = {
      {"file", file}, {"crc32", crc}, {"values", record.payload.size()}, {"header", record.header}};
  write_manifest(manifest);
}

Record SnapshotStore::load(const std::string& id) const {
  nlohmann::json manifest;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    manifest = read_manifest();
  }
  if (!manifest["records"].contains(id)) throw StoreError("store: no record '" + id + "'");
  const auto& entry = manifest["records"][id];
  const fs::path path = dir_ / entry["file"].get<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("store: missing file for '" + id + "'");
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof kMagic + 16 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw StoreError("store: '" + id + "' is not a record file");
  }
  size_t tail = buf.size() - sizeof(std::uint32_t);
  size_t pos = tail;
  const auto stored_crc = take<std::uint32_t>(buf, pos);
  if (stored_crc != crc_of(buf, tail) || stored_crc != entry["crc32"].get<std::uint32_t>()) {
    throw StoreError("store: checksum mismatch for '" + id + "'");
  }
  pos = sizeof kMagic;
  const auto header_length = take<std::uint32_t>(buf, pos);
  if (pos + header_length > tail) throw StoreError("store: truncated header in '" + id + "'");
  Record record;
  record.id = id;
  record.header = nlohmann::json::parse(buf.substr(pos, header_length));
  pos += header_length;
  const auto count = take<std::uint64_t>(buf, pos);
  if (pos + count * sizeof(double) != tail) throw StoreError("store: payload length mismatch in '" + id + "'");
  record.payload.resize(count);
  for (auto& v : record.payload) v = take<double>(buf, pos);
  return record;
}

bool SnapshotStore::contains(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const nlohmann::json manifest = read_manifest();
  return manifest["records"].contains(id) &&
         fs::exists(dir_ / manifest["records"][id]["file"].get<std::string>());
}

bool SnapshotStore::remove(const std::string& id) {
  std::lock_guard<std::mutex> lock(mutex_);
  nlohmann::json manifest = read_manifest();
  if (!manifest["records"].contains(id)) return false;
  std::error_code ec;
  fs::remove(dir_ / manifest["records"][id]["file"].get<std::string>(), ec);
  manifest["records"].erase(id);
  write_manifest(manifest);
  return true;
}

std::vector<ManifestEntry> SnapshotStore::list() const {
  std::lock_guard<std::mutex> lock(mutex_);
  const nlohmann::json manifest = read_manifest();
  std::vector<ManifestEntry> out;
  for (const auto& [id, entry] : manifest["records"].items()) {
    out.push_back({id, entry["file"].get<std::string>(), entry["crc32"].get<std::uint32_t>(),
                   entry["values"].get<std::uint64_t>(), entry["header"]});
  }
  return out;
}

Record encode_trajectory(const std::string& id, const Trajectory& trajectory, nlohmann::json header) {
  Record r;
  r.id = id;
  r.header = std::move(header);
  r.header["kind"] = "trajectory";
  r.header["final_time"] = trajectory.grid.final_time;
  r.header["steps"] = trajectory.grid.steps;
  r.header["field_size"] = trajectory.field_size();
  r.payload.reserve(static_cast<size_t>(trajectory.field_size()) * trajectory.levels());
  for (const Vector& f : trajectory.fields) r.payload.insert(r.payload.end(), f.data(), f.data() + f.size());
  return r;
}

Trajectory decode_trajectory(const Record& record) {
  if (record.header.value("kind", "") != "trajectory") throw StoreError("store: '" + record.id + "' is not a trajectory");
  const TimeGrid grid{record.header["final_time"].get<double>(), record.header["steps"].get<int>()};
  const auto size = record.header["field_size"].get<Eigen::Index>();
  if (record.payload.size() != static_cast<size_t>(size) * grid.levels()) {
    throw StoreError("store: trajectory payload length mismatch in '" + record.id + "'");
  }
  Trajectory t(grid, size);
  for (int n = 0; n < grid.levels(); ++n) t.fields[n] = Eigen::Map<const Vector>(record.payload.data() + n * size, size);
  return t;
}

Record encode_matrix(const std::string& id, const Matrix& m, nlohmann::json header) {
  Record r;
  r.id = id;
  r.header = std::move(header);
  r.header["kind"] = "matrix";
  r.header["rows"] = m.rows();
  r.header["cols"] = m.cols();
  r.payload.assign(m.data(), m.data() + m.size());
  return r;
}

Matrix decode_matrix(const Record& record) {
  if (record.header.value("kind", "") != "matrix") throw StoreError("store: '" + record.id + "' is not a matrix");
  const auto rows = record.header["rows"].get<Eigen::Index>();
  const auto cols = record.header["cols"].get<Eigen::Index>();
  if (record.payload.size() != static_cast<size_t>(rows * cols)) throw StoreError("store: matrix size mismatch");
  return Eigen::Map<const Matrix>(record.payload.data(), rows, cols);
}

Record encode_compressed(const std::string& id, const CompressedReference& ref, nlohmann::json header) {
  Record r;
  r.id = id;
  r.header = std::move(header);
  SpMat g = ref.gram;
  g.makeCompressed();
  r.header["kind"] = "compressed_reference";
  r.header["subdivisions"] = ref.target.subdivisions;
  r.header["steps"] = ref.target.steps;
  r.header["components"] = ref.components;
  r.header["final_time"] = ref.final_time;
  r.header["rows"] = ref.projections.rows();
  r.header["gram_nonzeros"] = g.nonZeros();
  auto& p = r.payload;
  p.assign(ref.projections.data(), ref.projections.data() + ref.projections.size());
  p.insert(p.end(), ref.energies.data(), ref.energies.data() + ref.energies.size());
  for (Eigen::Index c = 0; c <= g.outerSize(); ++c) p.push_back(g.outerIndexPtr()[c]);
  for (Eigen::Index k = 0; k < g.nonZeros(); ++k) p.push_back(g.innerIndexPtr()[k]);
  p.insert(p.end(), g.valuePtr(), g.valuePtr() + g.nonZeros());
  return r;
}

CompressedReference decode_compressed(const Record& record) {
  if (record.header.value("kind", "") != "compressed_reference") {
    throw StoreError("store: '" + record.id + "' is not a compressed reference");
  }
  CompressedReference ref;
  ref.target.subdivisions = record.header["subdivisions"].get<int>();
  ref.target.steps = record.header["steps"].get<int>();
  ref.components = record.header["components"].get<int>();
  ref.final_time = record.header["final_time"].get<double>();
  const auto rows = record.header["rows"].get<Eigen::Index>();
  const auto nnz = record.header["gram_nonzeros"].get<Eigen::Index>();
  const Eigen::Index levels = ref.target.steps + 1;
  const size_t expected = rows * levels + levels + (rows + 1) + 2 * nnz;
  if (record.payload.size() != expected) throw StoreError("store: compressed reference size mismatch");
  const double* p = record.payload.data();
  ref.projections = Eigen::Map<const Matrix>(p, rows, levels);
  p += rows * levels;
  ref.energies = Eigen::Map<const Vector>(p, levels);
  p += levels;
  std::vector<Triplet> entries;
  entries.reserve(nnz);
  const double* outer = p;
  const double* inner = p + rows + 1;
  const double* values = inner + nnz;
  for (Eigen::Index c = 0; c < rows; ++c) {
    for (auto k = static_cast<Eigen::Index>(outer[c]); k < static_cast<Eigen::Index>(outer[c + 1]); ++k) {
      entries.emplace_back(static_cast<int>(inner[k]), static_cast<int>(c), values[k]);
    }
  }
  ref.gram.resize(rows, rows);
  ref.gram.setFromTriplets(entries.begin(), entries.end());
  return ref;
}

}  // namespace nirb
