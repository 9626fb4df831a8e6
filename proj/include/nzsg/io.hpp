#ifndef NZSG_IO_HPP
#define NZSG_IO_HPP

// Flat-file formats.
//
// Instance file:
//   line 1  "NZSGINST 1"
//   line 2  byte length of the JSON metadata block
//   JSON metadata, then '\n'
//   payload, little-endian: u64 rows, u64 cols, u64 nnz,
//            u64 row_offsets[rows+1], u64 col_indices[nnz], f64 values[nnz]
// The matrix is stored before any transaction fee so one file serves a
// whole fee sweep.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nzsg/instances.hpp"
#include "nzsg/saddle.hpp"

namespace nzsg {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kInstanceMagic = "NZSGINST 1";

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  std::uint64_t u64() {
    if (pos + 8 > buf.size()) throw FormatError("instance file: truncated payload");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace detail

inline std::string encode_matrix(const SparseMatrix& M) {
  std::string p;
  p.reserve(24 + 8 * (M.rows() + 1) + 16 * M.nnz());
  detail::put_u64(p, M.rows());
  detail::put_u64(p, M.cols());
  detail::put_u64(p, M.nnz());
  for (auto o : M.row_offsets()) detail::put_u64(p, o);
  for (auto c : M.col_indices()) detail::put_u64(p, c);
  for (double v : M.values()) detail::put_f64(p, v);
  return p;
}

inline SparseMatrix decode_matrix(const std::string& payload) {
  detail::Reader r{payload};
  const std::uint64_t rows = r.u64(), cols = r.u64(), nnz = r.u64();
  if (payload.size() != 24 + 8 * (rows + 1) + 16 * nnz) throw FormatError("instance file: payload size mismatch");
  std::vector<std::size_t> offsets(rows + 1), cols_idx(nnz);
  std::vector<double> vals(nnz);
  for (auto& o : offsets) o = r.u64();
  for (auto& c : cols_idx) c = r.u64();
  for (auto& v : vals) v = r.f64();
  try {
    return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_idx), std::move(vals));
  } catch (const std::invalid_argument& ex) {
    throw FormatError(std::string("instance file: invalid matrix: ") + ex.what());
  }
}

inline nlohmann::json instance_metadata(const SparseExperiment& e, const std::string& payload) {
  return {{"format", "nzsg-instance"},
          {"version", 1},
          {"n", e.n},
          {"m", e.m},
          {"nnz", e.M.nnz()},
          {"seed", e.seed},
          {"mu", e.mu},
          {"nu", e.nu},
          {"normalized", e.normalized},
          {"scale", e.scale},
          {"payload_bytes", payload.size()},
          {"payload_fnv1a", detail::hex64(detail::fnv1a(payload))}};
}

inline std::string encode_instance(const SparseExperiment& e) {
  const std::string payload = encode_matrix(e.M);
  const std::string meta = instance_metadata(e, payload).dump();
  std::string out = std::string(kInstanceMagic) + "\n" + std::to_string(meta.size()) + "\n" + meta + "\n";
  return out + payload;
}

struct InstanceFile {
  SparseExperiment experiment;
  nlohmann::json metadata;
  std::string payload_hash;
};

inline InstanceFile decode_instance(const std::string& bytes) {
  std::size_t p1 = bytes.find('\n');
  if (p1 == std::string::npos || bytes.compare(0, p1, kInstanceMagic) != 0)
    throw FormatError("instance file: bad header");
  const std::size_t p2 = bytes.find('\n', p1 + 1);
  if (p2 == std::string::npos) throw FormatError("instance file: missing metadata length");
  std::size_t len = 0;
  try {
    len = std::stoull(bytes.substr(p1 + 1, p2 - p1 - 1));
  } catch (const std::exception&) {
    throw FormatError("instance file: bad metadata length");
  }
  if (p2 + 1 + len + 1 > bytes.size() || bytes[p2 + 1 + len] != '\n')
    throw FormatError("instance file: truncated metadata");
  InstanceFile f;
  try {
    f.metadata = nlohmann::json::parse(bytes.substr(p2 + 1, len));
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("instance file: bad metadata: ") + ex.what());
  }
  const std::string payload = bytes.substr(p2 + 1 + len + 1);
  f.payload_hash = detail::hex64(detail::fnv1a(payload));
  if (f.metadata.value("payload_fnv1a", std::string()) != f.payload_hash)
    throw FormatError("instance file: payload checksum mismatch");
  auto& e = f.experiment;
  e.M = decode_matrix(payload);
  e.n = f.metadata.at("n").get<std::size_t>();
  e.m = f.metadata.at("m").get<std::size_t>();
  if (e.M.cols() != e.n || e.M.rows() != e.m) throw FormatError("instance file: shape does not match metadata");
  e.seed = f.metadata.at("seed").get<std::uint64_t>();
  e.mu = f.metadata.at("mu").get<double>();
  e.nu = f.metadata.at("nu").get<double>();
  e.normalized = f.metadata.value("normalized", false);
  e.scale = f.metadata.value("scale", 1.0);
  return f;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void save_instance(const std::string& path, const SparseExperiment& e) { write_file(path, encode_instance(e)); }
inline InstanceFile load_instance(const std::string& path) { return decode_instance(read_file(path)); }

inline nlohmann::json to_json(const JointPoint& z) {
  return {{"x", std::vector<double>(z.x.begin(), z.x.end())}, {"y", std::vector<double>(z.y.begin(), z.y.end())}};
}

// Accepts {"x": [...], "y": [...]} or a report carrying a "point" member.
inline JointPoint point_from_json(const nlohmann::json& j) {
  const nlohmann::json& p = j.contains("point") ? j.at("point") : j;
  try {
    return {DenseVector(p.at("x").get<std::vector<double>>()), DenseVector(p.at("y").get<std::vector<double>>())};
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("point file: ") + ex.what());
  }
}

inline nlohmann::json to_json(const QueryLedger& l) {
  return {{"f", l.f_queries}, {"h", l.h_queries}, {"g", l.g_queries}, {"cert", l.cert_queries}};
}

// Report columns. A full-operator query evaluates both the zero-sum and the
// coupling part; it is charged to queries_h so that baselines and the
// subproblem solver share one column.
inline long long reported_h(const QueryLedger& l) { return l.h_queries + l.f_queries; }

}  // namespace nzsg

#endif
