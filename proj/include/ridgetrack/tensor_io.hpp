#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/video_tensor.hpp"

namespace ridgetrack {

/// Binary tensor container: 8-byte magic, three little-endian u64 dimensions
/// (width, height, frames), then width*height*frames little-endian f64
/// samples in storage order. PGM sequences are the interchange alternative:
/// one P5 file per frame, values rounded to the nearest integer (8-bit when
/// everything fits below 256, 16-bit big-endian otherwise).

inline constexpr char kTensorMagic[8] = {'R', 'T', 'K', 'T', 'E', 'N', 'S', '1'};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw IoError("read failure on " + path);
  return bytes;
}

inline void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace detail

inline void save_tensor(const VideoTensor& v, const std::string& path) {
  if (!v.all_finite()) throw IoError("refusing to save non-finite tensor to " + path);
  std::string bytes;
  bytes.reserve(32 + v.size() * 8);
  bytes.append(kTensorMagic, 8);
  detail::put_u64(bytes, static_cast<std::uint64_t>(v.width()));
  detail::put_u64(bytes, static_cast<std::uint64_t>(v.height()));
  detail::put_u64(bytes, static_cast<std::uint64_t>(v.frames()));
  for (std::size_t i = 0; i < v.size(); ++i)
    detail::put_u64(bytes, std::bit_cast<std::uint64_t>(v.data()[i]));
  detail::write_all(path, bytes);
}

inline VideoTensor load_tensor(const std::string& path) {
  std::string bytes = detail::read_all(path);
  if (bytes.size() < 32) throw IoError(path + ": truncated header");
  if (std::memcmp(bytes.data(), kTensorMagic, 8) != 0)
    throw IoError(path + ": bad magic, not a tensor file");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::uint64_t m = detail::get_u64(p + 8);
  std::uint64_t n = detail::get_u64(p + 16);
  std::uint64_t t = detail::get_u64(p + 24);
  if (m == 0 || n == 0 || t == 0) throw IoError(path + ": non-positive dimension in header");
  constexpr std::uint64_t kMaxVoxels = std::uint64_t{1} << 33;
  unsigned __int128 total = static_cast<unsigned __int128>(m) * n * t;
  if (m > kMaxVoxels || n > kMaxVoxels || t > kMaxVoxels || total > kMaxVoxels)
    throw IoError(path + ": implausible dimensions in header");
  std::size_t count = static_cast<std::size_t>(total);
  if (bytes.size() < 32 + count * 8) throw IoError(path + ": truncated payload");
  if (bytes.size() > 32 + count * 8) throw IoError(path + ": trailing bytes after payload");
  VideoTensor out(static_cast<int>(m), static_cast<int>(n), static_cast<int>(t));
  for (std::size_t i = 0; i < count; ++i)
    out.data()[i] = std::bit_cast<double>(detail::get_u64(p + 32 + 8 * i));
  if (!out.all_finite()) throw IoError(path + ": non-finite sample in payload");
  return out;
}

namespace detail {

inline int pgm_token(std::istream& in) {
  // Skips whitespace and '#' comment lines, then reads one decimal token.
  int c = in.get();
  while (c == '#' || std::isspace(c)) {
    if (c == '#')
      while (c != '\n' && c != EOF) c = in.get();
    c = in.get();
  }
  int value = -1;
  while (c >= '0' && c <= '9') {
    if (value < 0) value = 0;
    value = value * 10 + (c - '0');
    if (value > 1 << 28) return -1;
    c = in.get();
  }
  if (c != EOF) in.unget();
  return value;
}

}  // namespace detail

inline void save_pgm_sequence(const VideoTensor& v, const std::string& dir) {
  std::vector<long> q(v.size());
  long maxv = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = v.data()[i];
    if (!std::isfinite(x)) throw IoError("non-finite sample, cannot quantize for PGM");
    long r = std::lround(x);
    if (r < 0 || r > 65535)
      throw IoError("sample " + std::to_string(x) + " outside PGM range [0, 65535]");
    q[i] = r;
    maxv = std::max(maxv, r);
  }
  int maxval = maxv <= 255 ? 255 : 65535;
  std::filesystem::create_directories(dir);
  std::size_t frame = static_cast<std::size_t>(v.width()) * v.height();
  for (int tau = 0; tau < v.frames(); ++tau) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.pgm", tau);
    std::string body = "P5\n" + std::to_string(v.width()) + " " + std::to_string(v.height()) +
                       "\n" + std::to_string(maxval) + "\n";
    const long* src = q.data() + frame * tau;
    for (std::size_t i = 0; i < frame; ++i) {
      if (maxval > 255) body.push_back(static_cast<char>((src[i] >> 8) & 0xff));
      body.push_back(static_cast<char>(src[i] & 0xff));
    }
    detail::write_all((std::filesystem::path(dir) / name).string(), body);
  }
}

inline VideoTensor load_pgm_sequence(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  if (files.empty()) throw IoError("no .pgm frames found in " + dir);
  std::sort(files.begin(), files.end());

  VideoTensor out;
  for (std::size_t tau = 0; tau < files.size(); ++tau) {
    std::ifstream in(files[tau], std::ios::binary);
    if (!in) throw IoError("cannot open " + files[tau].string());
    char p = 0, five = 0;
    in.get(p);
    in.get(five);
    if (p != 'P' || five != '5') throw IoError(files[tau].string() + ": not a binary PGM");
    int w = detail::pgm_token(in);
    int h = detail::pgm_token(in);
    int maxval = detail::pgm_token(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
      throw IoError(files[tau].string() + ": malformed PGM header");
    in.get();  // single whitespace byte before the raster
    if (tau == 0) {
      out = VideoTensor(w, h, static_cast<int>(files.size()));
    } else if (w != out.width() || h != out.height()) {
      throw IoError(files[tau].string() + ": frame dimensions differ from the first frame");
    }
    std::size_t frame = static_cast<std::size_t>(w) * h;
    int bytes_per = maxval > 255 ? 2 : 1;
    std::string raster(frame * bytes_per, '\0');
    in.read(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(in.gcount()) != raster.size())
      throw IoError(files[tau].string() + ": truncated raster");
    const auto* rp = reinterpret_cast<const unsigned char*>(raster.data());
    double* dst = out.data() + frame * tau;
    for (std::size_t i = 0; i < frame; ++i)
      dst[i] = bytes_per == 2 ? double(rp[2 * i] << 8 | rp[2 * i + 1]) : double(rp[i]);
  }
  return out;
}

/// Dispatches on path shape: directories hold PGM sequences, files hold the
/// binary container.
inline VideoTensor load_video(const std::string& path) {
  if (std::filesystem::is_directory(path)) return load_pgm_sequence(path);
  return load_tensor(path);
}

}  // namespace ridgetrack
