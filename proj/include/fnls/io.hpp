// fnls: profile files, CSV series, plot data and run manifests.
//
// FNLS profile layout (little-endian): "FNLS", u32 version = 1, u64 N,
// f64 a, b, lambda, zeta, beta, sigma, omega, c, then N (re, im) f64 pairs.
// Snapshots append one f64 time.
#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/petviashvili.hpp"

namespace fnls {

inline constexpr std::uint32_t kProfileFormatVersion = 1;

/// 15 significant digits, '.' decimal separator.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T)) throw Error(ErrorCode::TruncatedFile, "profile file ends early");
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace detail

struct StoredProfile {
  ComplexField field;
  ModelParams params;
  WaveParams wave;
  std::optional<double> t;
};

inline std::string encode_profile(const ComplexField& u, const ModelParams& p, const WaveParams& w,
                                  std::optional<double> t = std::nullopt) {
  std::string out = "FNLS";
  detail::put_le<std::uint32_t>(out, kProfileFormatVersion);
  detail::put_le<std::uint64_t>(out, u.size());
  const auto& g = u.grid();
  for (double v : {g.a(), g.b(), p.lambda, p.zeta, p.beta, p.sigma, w.omega, w.c}) detail::put_le(out, v);
  for (const auto& z : u.values()) {
    detail::put_le(out, z.real());
    detail::put_le(out, z.imag());
  }
  if (t) detail::put_le(out, *t);
  return out;
}

inline StoredProfile decode_profile(const std::string& bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "profile file shorter than its magic");
  if (bytes.compare(0, 4, "FNLS") != 0) throw Error(ErrorCode::BadMagic, "not an FNLS profile file");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != kProfileFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "profile format version " + std::to_string(version));
  }
  const auto n = detail::get_le<std::uint64_t>(bytes, pos);
  std::array<double, 8> hdr{};
  for (auto& v : hdr) v = detail::get_le<double>(bytes, pos);
  const std::uint64_t payload = n * 16;
  if (n > (bytes.size() - pos) / 16 || bytes.size() - pos < payload) {
    throw Error(ErrorCode::TruncatedFile, "profile file holds fewer than N = " + std::to_string(n) + " samples");
  }
  StoredProfile out;
  auto grid = make_grid(hdr[0], hdr[1], static_cast<std::size_t>(n));
  std::vector<cplx> values(n);
  for (auto& z : values) {
    const double re = detail::get_le<double>(bytes, pos);
    const double im = detail::get_le<double>(bytes, pos);
    z = cplx(re, im);
  }
  out.field = ComplexField(grid, std::move(values));
  out.params = ModelParams{hdr[2], hdr[3], hdr[4], hdr[5]};
  out.wave = WaveParams{hdr[6], hdr[7]};
  const std::size_t rest = bytes.size() - pos;
  if (rest == 8) {
    out.t = detail::get_le<double>(bytes, pos);
  } else if (rest != 0) {
    throw Error(ErrorCode::TruncatedFile, std::to_string(rest) + " stray bytes after the samples");
  }
  return out;
}

inline void write_profile(const std::filesystem::path& path, const ComplexField& u, const ModelParams& p,
                          const WaveParams& w, std::optional<double> t = std::nullopt) {
  detail::write_file(path, encode_profile(u, p, w, t));
}

inline StoredProfile read_profile(const std::filesystem::path& path) { return decode_profile(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Text series
// ---------------------------------------------------------------------------

/// Comma-separated table with a header line; every column has the same length.
inline std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      out += format_double(cols[c][r]);
    }
    out += '\n';
  }
  return out;
}

/// Whitespace-separated columns without header, for gnuplot-style tools.
inline std::string dat_table(const std::vector<std::vector<double>>& cols) {
  std::string out;
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ' ';
      out += format_double(cols[c][r]);
    }
    out += '\n';
  }
  return out;
}

inline std::string diagnostics_csv(const std::vector<InvariantSnapshot>& rows) {
  std::vector<std::vector<double>> cols(7);
  for (const auto& r : rows) {
    cols[0].push_back(r.t);
    cols[1].push_back(r.F);
    cols[2].push_back(r.E);
    cols[3].push_back(r.P);
    cols[4].push_back(r.chi);
    cols[5].push_back(r.linf);
    cols[6].push_back(r.deltaF);
  }
  return csv_table({"t", "F", "E", "P", "chi", "linf", "deltaF"}, cols);
}

inline std::string trace_csv(const ConvergenceTrace& tr) {
  std::vector<double> n(tr.error.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = static_cast<double>(i + 1);
  return csv_table({"n", "error", "stab", "res"}, {n, tr.error, tr.stab, tr.res});
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Collects artifacts written to one output directory together with
/// key: value facts about the run, and writes them as manifest.txt.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& data) {
    detail::write_file(dir_ / name, data);
    files_.emplace_back(name, sha256_hex(data));
  }

  void profile(const std::string& name, const ComplexField& u, const ModelParams& p, const WaveParams& w,
               std::optional<double> t = std::nullopt) {
    write(name, encode_profile(u, p, w, t));
  }

  void fact(const std::string& key, const std::string& value) { facts_.emplace_back(key, value); }
  void fact(const std::string& key, double value) { facts_.emplace_back(key, format_double(value)); }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
  const std::vector<std::pair<std::string, std::string>>& facts() const { return facts_; }

  std::optional<std::string> fact_value(const std::string& key) const {
    for (const auto& [k, v] : facts_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  void write_manifest() const {
    std::string out;
    for (const auto& [k, v] : facts_) out += k + ": " + v + "\n";
    for (const auto& [name, hash] : files_) out += "artifact: " + name + " sha256=" + hash + "\n";
    detail::write_file(dir_ / "manifest.txt", out);
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::pair<std::string, std::string>> facts_;
};

}  // namespace fnls
