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

#ifndef UDBM_DATA_HPP
#define UDBM_DATA_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "udbm/model.hpp"
#include "udbm/rng.hpp"

namespace udbm {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr int kBitsPerPixel = 8;

/// 8-bit value -> bits, most significant first.
inline std::array<int, 8> binarize_u8(int value) {
  if (value < 0 || value > 255) {
    throw std::out_of_range("binarize_u8: value " + std::to_string(value) + " not in [0, 255]");
  }
  std::array<int, 8> bits{};
  for (int b = 0; b < 8; ++b) bits[static_cast<std::size_t>(b)] = (value >> (7 - b)) & 1;
  return bits;
}

inline int debinarize_u8(const std::array<int, 8>& bits) {
  int v = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("debinarize_u8: bit not in {0, 1}");
    v = (v << 1) | b;
  }
  return v;
}

/// Grayscale images as stored in an IDX file: count x rows x cols bytes.
struct RawImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;

  std::size_t image_size() const { return static_cast<std::size_t>(rows) * cols; }
  const std::uint8_t* image(std::size_t i) const { return pixels.data() + i * image_size(); }
};

struct BinaryDataset {
  std::vector<SpinVec> examples;
  std::string origin;
  Index height = 0;
  Index width = 0;
  Index bit_depth = 0;

  std::size_t size() const { return examples.size(); }
  Index length() const { return examples.empty() ? 0 : examples.front().size(); }
};

namespace detail {

inline std::uint32_t read_be32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (is.gcount() != 4) throw FormatError("idx: truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

inline void write_be32(std::ostream& os, std::uint32_t x) {
  const unsigned char b[4] = {static_cast<unsigned char>(x >> 24), static_cast<unsigned char>(x >> 16),
                              static_cast<unsigned char>(x >> 8), static_cast<unsigned char>(x)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline RawImages read_idx_images(std::istream& is) {
  RawImages r;
  const std::uint32_t magic = detail::read_be32(is);
  if (magic != kIdxImageMagic) {
    std::ostringstream msg;
    msg << "idx: bad magic 0x" << std::hex << magic << " (expected 0x803)";
    throw FormatError(msg.str());
  }
  r.count = detail::read_be32(is);
  r.rows = detail::read_be32(is);
  r.cols = detail::read_be32(is);
  // 2^34 bytes is far beyond any image set this reader is meant for.
  const double total = static_cast<double>(r.count) * r.rows * r.cols;
  if (total > 0x1.0p34) throw FormatError("idx: dimensions overflow");
  r.pixels.resize(static_cast<std::size_t>(total));
  is.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (static_cast<std::size_t>(is.gcount()) != r.pixels.size()) throw FormatError("idx: truncated pixel data");
  return r;
}

inline RawImages load_idx_images(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("idx: cannot open " + path);
  return read_idx_images(is);
}

inline void write_idx_images(std::ostream& os, const RawImages& r) {
  detail::write_be32(os, kIdxImageMagic);
  detail::write_be32(os, r.count);
  detail::write_be32(os, r.rows);
  detail::write_be32(os, r.cols);
  os.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
}

inline void save_idx_images(const std::string& path, const RawImages& r) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("idx: cannot open " + path + " for writing");
  write_idx_images(os, r);
}

/// Box-filter downscale to target_rows x target_cols (each source pixel lands in one cell).
inline RawImages downscale(const RawImages& src, std::uint32_t target_rows, std::uint32_t target_cols) {
  if (target_rows == 0 || target_cols == 0 || target_rows > src.rows || target_cols > src.cols) {
    throw std::invalid_argument("downscale: target must be within source size");
  }
  RawImages out;
  out.count = src.count;
  out.rows = target_rows;
  out.cols = target_cols;
  out.pixels.assign(static_cast<std::size_t>(src.count) * target_rows * target_cols, 0);
  std::vector<std::uint64_t> sum(static_cast<std::size_t>(target_rows) * target_cols);
  std::vector<std::uint64_t> cnt(sum.size());
  for (std::size_t n = 0; n < src.count; ++n) {
    std::fill(sum.begin(), sum.end(), 0);
    std::fill(cnt.begin(), cnt.end(), 0);
    const std::uint8_t* img = src.image(n);
    for (std::uint32_t r = 0; r < src.rows; ++r) {
      const std::size_t tr = static_cast<std::size_t>(r) * target_rows / src.rows;
      for (std::uint32_t c = 0; c < src.cols; ++c) {
        const std::size_t tc = static_cast<std::size_t>(c) * target_cols / src.cols;
        sum[tr * target_cols + tc] += img[static_cast<std::size_t>(r) * src.cols + c];
        ++cnt[tr * target_cols + tc];
      }
    }
    for (std::size_t k = 0; k < sum.size(); ++k) {
      out.pixels[n * sum.size() + k] = static_cast<std::uint8_t>((sum[k] + cnt[k] / 2) / cnt[k]);
    }
  }
  return out;
}

/// One image -> spins, pixel-major and MSB-first within each pixel; bit b maps to 2b - 1.
inline SpinVec image_to_spins(const std::uint8_t* pixels, std::size_t n_pixels) {
  SpinVec s(static_cast<Index>(n_pixels * kBitsPerPixel));
  for (std::size_t i = 0; i < n_pixels; ++i) {
    const auto bits = binarize_u8(pixels[i]);
    for (int b = 0; b < kBitsPerPixel; ++b) {
      s[static_cast<Index>(i * kBitsPerPixel + b)] = bits[static_cast<std::size_t>(b)] ? 1.0 : -1.0;
    }
  }
  return s;
}

/// Inverse of image_to_spins.
inline std::vector<std::uint8_t> spins_to_image(const SpinVec& s) {
  if (s.size() % kBitsPerPixel != 0) throw DimensionError("spins_to_image: length not a multiple of 8");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(s.size() / kBitsPerPixel));
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<int, 8> bits{};
    for (int b = 0; b < kBitsPerPixel; ++b) {
      bits[static_cast<std::size_t>(b)] = s[static_cast<Index>(i * kBitsPerPixel + b)] > 0 ? 1 : 0;
    }
    out[i] = static_cast<std::uint8_t>(debinarize_u8(bits));
  }
  return out;
}

inline BinaryDataset to_spin_dataset(const RawImages& raw, const std::string& origin = {}) {
  BinaryDataset d;
  d.origin = origin;
  d.height = raw.rows;
  d.width = raw.cols;
  d.bit_depth = kBitsPerPixel;
  d.examples.reserve(raw.count);
  for (std::size_t n = 0; n < raw.count; ++n) d.examples.push_back(image_to_spins(raw.image(n), raw.image_size()));
  return d;
}

inline RawImages from_spin_dataset(const std::vector<SpinVec>& xs, std::uint32_t rows, std::uint32_t cols) {
  RawImages r;
  r.count = static_cast<std::uint32_t>(xs.size());
  r.rows = rows;
  r.cols = cols;
  for (const auto& x : xs) {
    if (x.size() != static_cast<Index>(rows) * cols * kBitsPerPixel) {
      throw DimensionError("from_spin_dataset: vector length does not match image size");
    }
    const auto img = spins_to_image(x);
    r.pixels.insert(r.pixels.end(), img.begin(), img.end());
  }
  return r;
}

/// Observed iff the bit belongs to a pixel row < height / 2.
inline Mask lower_half_mask(Index height, Index width, Index bit_depth = kBitsPerPixel) {
  Mask m;
  m.observed.resize(static_cast<std::size_t>(height * width * bit_depth));
  const Index keep_rows = height / 2;
  for (Index r = 0; r < height; ++r) {
    for (Index k = 0; k < width * bit_depth; ++k) {
      m.observed[static_cast<std::size_t>(r * width * bit_depth + k)] = r < keep_rows;
    }
  }
  return m;
}

/// Marks pixels in rows [r0, r1) x cols [c0, c1) missing, everything else observed.
inline Mask rect_missing_mask(Index height, Index width, Index r0, Index c0, Index r1, Index c1,
                              Index bit_depth = kBitsPerPixel) {
  Mask m;
  m.observed.assign(static_cast<std::size_t>(height * width * bit_depth), true);
  for (Index r = std::max<Index>(r0, 0); r < std::min(r1, height); ++r) {
    for (Index c = std::max<Index>(c0, 0); c < std::min(c1, width); ++c) {
      for (Index b = 0; b < bit_depth; ++b) {
        m.observed[static_cast<std::size_t>((r * width + c) * bit_depth + b)] = false;
      }
    }
  }
  return m;
}

/// n distinct uniform +-1 vectors, reproducible from the seed.
inline BinaryDataset synthetic_patterns(std::size_t n_patterns, Index length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("synthetic_patterns: length must be >= 1");
  if (length < 63 && n_patterns > (std::uint64_t{1} << length)) {
    throw std::invalid_argument("synthetic_patterns: more patterns than distinct vectors");
  }
  Rng rng(seed);
  BinaryDataset d;
  d.origin = "synthetic:" + std::to_string(n_patterns) + "x" + std::to_string(length) + ":" + std::to_string(seed);
  std::set<std::vector<double>> seen;
  const std::size_t max_draws = 1000 * n_patterns + 1000;
  for (std::size_t draw = 0; d.examples.size() < n_patterns; ++draw) {
    if (draw >= max_draws) throw std::runtime_error("synthetic_patterns: could not draw distinct patterns");
    SpinVec s = rng.spins(length);
    if (seen.insert(std::vector<double>(s.data(), s.data() + s.size())).second) d.examples.push_back(std::move(s));
  }
  return d;
}

/// Text form of a spin vector: '1' for +1, '0' for -1.
inline std::string spins_to_bits(const SpinVec& s) {
  std::string out(static_cast<std::size_t>(s.size()), '0');
  for (Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s[i] > 0 ? '1' : '0';
  return out;
}

/// Parses '0'/'1' (and '?' for missing, when a mask is requested) into spins.
inline SpinVec bits_to_spins(const std::string& line, Mask* mask = nullptr) {
  SpinVec s(static_cast<Index>(line.size()));
  if (mask) mask->observed.assign(line.size(), true);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '1') {
      s[static_cast<Index>(i)] = 1.0;
    } else if (c == '0') {
      s[static_cast<Index>(i)] = -1.0;
    } else if (c == '?' && mask) {
      s[static_cast<Index>(i)] = -1.0;
      mask->observed[i] = false;
    } else {
      throw FormatError(std::string("bits: unexpected character '") + c + "'");
    }
  }
  return s;
}

/// Binary PGM (P5), 8-bit.
inline void write_pgm(const std::string& path, const std::uint8_t* pixels, Index rows, Index cols) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("pgm: cannot open " + path);
  os << "P5\n" << cols << " " << rows << "\n255\n";
  os.write(reinterpret_cast<const char*>(pixels), static_cast<std::streamsize>(rows * cols));
}

}  // namespace udbm

#endif  // UDBM_DATA_HPP
