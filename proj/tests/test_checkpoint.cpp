// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#include "flp/checkpoint.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using flp::load_state;
using flp::save_state;
using flp::Sector;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Checkpoint, RoundTripsSectorAndStateBitwise) {
  const Sector sector{5, 3, 2};
  Eigen::VectorXd state(100);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  for (Eigen::Index i = 0; i < state.size(); ++i) state[i] = gauss(rng);
  const auto path = temp_file("flp_ckpt_roundtrip.bin");
  save_state(path, sector, state);
  const auto cp = load_state(path);
  EXPECT_EQ(cp.sector, sector);
  ASSERT_EQ(cp.state.size(), state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) EXPECT_EQ(cp.state[i], state[i]);
  std::filesystem::remove(path);
}

TEST(Checkpoint, FileLayoutIsFrozen) {
  Eigen::VectorXd state(2);
  state << 1.0, -0.5;
  const auto path = temp_file("flp_ckpt_golden.bin");
  save_state(path, Sector{2, 1, 0}, state);
  const std::string bytes = slurp(path);
  std::string expected = "FLP1";
  const auto u64le = [&](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) expected.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  };
  u64le(2);
  u64le(1);
  u64le(0);
  u64le(2);
  u64le(0x3ff0000000000000ull);  // 1.0
  u64le(0xbfe0000000000000ull);  // -0.5
  EXPECT_EQ(bytes, expected);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RewriteProducesIdenticalBytes) {
  Eigen::VectorXd state(4);
  state << 0.25, -0.125, 3.5, 0.0;
  const auto p1 = temp_file("flp_ckpt_a.bin");
  const auto p2 = temp_file("flp_ckpt_b.bin");
  save_state(p1, Sector{2, 1, 1}, state);
  save_state(p2, Sector{2, 1, 1}, state);
  EXPECT_EQ(slurp(p1), slurp(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Checkpoint, RejectsWrongMagic) {
  const auto path = temp_file("flp_ckpt_magic.bin");
  spit(path, "NOPE" + std::string(40, '\0'));
  EXPECT_THROW(load_state(path), flp::IoError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsCorruptHeaderFields) {
  const auto path = temp_file("flp_ckpt_header.bin");
  std::string bytes = "FLP1";
  const auto u64le = [&](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  };
  u64le(31);  // beyond the 30-site mask width
  u64le(1);
  u64le(1);
  u64le(961);
  spit(path, bytes);
  EXPECT_THROW(load_state(path), flp::IoError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsDimensionMismatch) {
  const auto path = temp_file("flp_ckpt_dim.bin");
  std::string bytes = "FLP1";
  const auto u64le = [&](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  };
  u64le(4);
  u64le(2);
  u64le(2);
  u64le(35);  // C(4,2)^2 is 36
  spit(path, bytes);
  EXPECT_THROW(load_state(path), flp::IoError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsTruncatedPayload) {
  const Sector sector{4, 2, 2};
  Eigen::VectorXd state = Eigen::VectorXd::Ones(36);
  const auto path = temp_file("flp_ckpt_trunc.bin");
  save_state(path, sector, state);
  const std::string bytes = slurp(path);
  spit(path, bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(load_state(path), flp::IoError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, MissingFileIsAnIoError) {
  EXPECT_THROW(load_state(temp_file("flp_ckpt_does_not_exist.bin")), flp::IoError);
}
