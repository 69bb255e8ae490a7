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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

namespace udbm {
namespace {

std::string bytes_of(const DbmParams& p) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(os, p);
  return os.str();
}

TEST(Checkpoint, ExactByteLayout) {
  DbmParams p = DbmParams::zeros({2, 1, 1});
  p.W1(0, 0) = 1.0;
  p.W1(1, 0) = -2.0;
  p.W2(0, 0) = 0.5;
  p.b_v << 0.25, 3.0;
  p.b_h1 << -1.0;
  p.b_h2 << 8.0;
  const std::string b = bytes_of(p);
  ASSERT_EQ(b.size(), 4 + 1 + 12 + 8 * (2 + 1 + 2 + 1 + 1));
  EXPECT_EQ(b.substr(0, 4), "UDBM");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1);
  // n_v = 2 little-endian
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 2);
  EXPECT_EQ(b[6], 0);
  EXPECT_EQ(b[7], 0);
  EXPECT_EQ(b[8], 0);
  // first float is W1(0,0) = 1.0 = 0x3FF0000000000000, little-endian
  const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(static_cast<unsigned char>(b[17 + i]), one[i]);
  // last float is b_h2 = 8.0 = 0x4020000000000000
  EXPECT_EQ(static_cast<unsigned char>(b[b.size() - 1]), 0x40);
  EXPECT_EQ(static_cast<unsigned char>(b[b.size() - 2]), 0x20);
}

TEST(Checkpoint, RowMajorWeights) {
  DbmParams p = DbmParams::zeros({2, 2, 1});
  p.W1 << 1, 2, 3, 4;
  const std::string b = bytes_of(p);
  auto f64_at = [&](std::size_t off) {
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = (u << 8) | static_cast<unsigned char>(b[off + i]);
    return std::bit_cast<double>(u);
  };
  EXPECT_EQ(f64_at(17), 1.0);
  EXPECT_EQ(f64_at(25), 2.0);
  EXPECT_EQ(f64_at(33), 3.0);
  EXPECT_EQ(f64_at(41), 4.0);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(1);
  const DbmParams p = testing::random_params({5, 4, 3}, rng);
  std::istringstream is(bytes_of(p), std::ios::binary);
  const DbmParams q = read_checkpoint(is);
  EXPECT_EQ(q.shape(), p.shape());
  EXPECT_EQ(q.W1, p.W1);
  EXPECT_EQ(q.W2, p.W2);
  EXPECT_EQ(q.b_v, p.b_v);
  EXPECT_EQ(q.b_h1, p.b_h1);
  EXPECT_EQ(q.b_h2, p.b_h2);
  EXPECT_EQ(bytes_of(q), bytes_of(p));
}

TEST(Checkpoint, FileRoundTrip) {
  testing::TempDir dir;
  Rng rng(2);
  const DbmParams p = testing::random_params({3, 3, 0}, rng);
  save_checkpoint(dir.file("m.udbm"), p);
  EXPECT_EQ(bytes_of(load_checkpoint(dir.file("m.udbm"))), bytes_of(p));
  EXPECT_THROW(load_checkpoint(dir.file("missing.udbm")), FormatError);
}

TEST(Checkpoint, RejectsBadMagicVersionAndTruncation) {
  const std::string good = bytes_of(DbmParams::zeros({2, 2, 2}));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  std::string bad_version = good;
  bad_version[4] = 2;
  for (const std::string& s : {bad_magic, bad_version, good.substr(0, good.size() - 1), good.substr(0, 3),
                               std::string()}) {
    std::istringstream is(s, std::ios::binary);
    EXPECT_THROW(read_checkpoint(is), FormatError);
  }
}

TEST(Checkpoint, RejectsImplausibleHeader) {
  std::string s = bytes_of(DbmParams::zeros({1, 1, 1})).substr(0, 17);
  for (int i = 5; i < 13; ++i) s[i] = static_cast<char>(0xFF);
  std::istringstream is(s, std::ios::binary);
  EXPECT_THROW(read_checkpoint(is), FormatError);
}

}  // namespace
}  // namespace udbm
