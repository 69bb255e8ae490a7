// Copyright 2026 The udbm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// UDBM checkpoint files:
//
//   "UDBM" | u8 version (=1) | u32le n_v | u32le n_h1 | u32le n_h2 |
//   f64le W1 (row-major) | f64le W2 (row-major) | f64le b_v | b_h1 | b_h2

#ifndef UDBM_CHECKPOINT_HPP
#define UDBM_CHECKPOINT_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "udbm/model.hpp"

namespace udbm {

inline constexpr char kCheckpointMagic[4] = {'U', 'D', 'B', 'M'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& os, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void read_exact(std::istream& is, unsigned char* dst, std::size_t n) {
  is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw FormatError("checkpoint: truncated file");
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  read_exact(is, b, 4);
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return x;
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  read_exact(is, b, 8);
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(x);
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const DbmParams& p) {
  p.validate();
  const DbmShape s = p.shape();
  constexpr auto u32max = std::numeric_limits<std::uint32_t>::max();
  if (s.n_v > u32max || s.n_h1 > u32max || s.n_h2 > u32max) {
    throw DimensionError("checkpoint: layer width exceeds 32 bits");
  }
  os.write(kCheckpointMagic, 4);
  os.put(static_cast<char>(kCheckpointVersion));
  detail::put_u32(os, static_cast<std::uint32_t>(s.n_v));
  detail::put_u32(os, static_cast<std::uint32_t>(s.n_h1));
  detail::put_u32(os, static_cast<std::uint32_t>(s.n_h2));
  for (Index i = 0; i < p.W1.rows(); ++i)
    for (Index j = 0; j < p.W1.cols(); ++j) detail::put_f64(os, p.W1(i, j));
  for (Index i = 0; i < p.W2.rows(); ++i)
    for (Index j = 0; j < p.W2.cols(); ++j) detail::put_f64(os, p.W2(i, j));
  for (Index i = 0; i < p.b_v.size(); ++i) detail::put_f64(os, p.b_v[i]);
  for (Index i = 0; i < p.b_h1.size(); ++i) detail::put_f64(os, p.b_h1[i]);
  for (Index i = 0; i < p.b_h2.size(); ++i) detail::put_f64(os, p.b_h2[i]);
  if (!os) throw FormatError("checkpoint: write failed");
}

inline DbmParams read_checkpoint(std::istream& is) {
  unsigned char magic[4];
  detail::read_exact(is, magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  unsigned char version;
  detail::read_exact(is, &version, 1);
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  DbmShape s;
  s.n_v = detail::get_u32(is);
  s.n_h1 = detail::get_u32(is);
  s.n_h2 = detail::get_u32(is);
  try {
    s.validate();
  } catch (const DimensionError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  // refuse to allocate for headers that cannot belong to a real file
  const double n_params = static_cast<double>(s.n_v) * static_cast<double>(s.n_h1) +
                          static_cast<double>(s.n_h1) * static_cast<double>(s.n_h2) +
                          static_cast<double>(s.total());
  if (n_params > 0x1.0p32) throw FormatError("checkpoint: implausible layer widths " + s.str());
  DbmParams p = DbmParams::zeros(s);
  for (Index i = 0; i < p.W1.rows(); ++i)
    for (Index j = 0; j < p.W1.cols(); ++j) p.W1(i, j) = detail::get_f64(is);
  for (Index i = 0; i < p.W2.rows(); ++i)
    for (Index j = 0; j < p.W2.cols(); ++j) p.W2(i, j) = detail::get_f64(is);
  for (Index i = 0; i < p.b_v.size(); ++i) p.b_v[i] = detail::get_f64(is);
  for (Index i = 0; i < p.b_h1.size(); ++i) p.b_h1[i] = detail::get_f64(is);
  for (Index i = 0; i < p.b_h2.size(); ++i) p.b_h2[i] = detail::get_f64(is);
  return p;
}

inline void save_checkpoint(const std::string& path, const DbmParams& p) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("checkpoint: cannot open " + path + " for writing");
  write_checkpoint(os, p);
}

inline DbmParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("checkpoint: cannot open " + path);
  return read_checkpoint(is);
}

}  // namespace udbm

#endif  // UDBM_CHECKPOINT_HPP
