// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dppsi/io.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace dppsi::io {
namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("dppsi_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& content) {
    auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

  std::filesystem::path dir_;
};

TEST_F(IoTest, DuplicatesDroppedInOrder) {
  auto r = LoadItems(Write("x.txt", "a\nb\na\n"));
  EXPECT_EQ(r.items, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(r.duplicates, 1u);
  EXPECT_FALSE(r.payloads.has_value());
}

TEST_F(IoTest, EmptyFile) {
  auto r = LoadItems(Write("x.txt", ""));
  EXPECT_TRUE(r.items.empty());
  EXPECT_EQ(r.duplicates, 0u);
}

TEST_F(IoTest, LineEndingsAndBlanks) {
  auto r = LoadItems(Write("x.txt", "a\r\n\nb\r\nc"));
  EXPECT_EQ(r.items, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(r.blank_lines, 1u);
}

TEST_F(IoTest, LargeFile) {
  std::vector<std::string> items;
  for (int i = 0; i < (1 << 17); ++i) items.push_back("item-" + std::to_string(i));
  const auto path = (dir_ / "big.txt").string();
  WriteItems(path, items);
  auto r = LoadItems(path);
  EXPECT_EQ(r.items, items);
  EXPECT_EQ(r.duplicates, 0u);
}

TEST_F(IoTest, PayloadsAligned) {
  auto r = LoadItems(Write("x.txt", "a\nb\na\nc\n"), Write("p.txt", "1.5\n2\n99\n-3e2\n"));
  EXPECT_EQ(r.items, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_TRUE(r.payloads.has_value());
  EXPECT_EQ(*r.payloads, (std::vector<double>{1.5, 2.0, -300.0}));
}

TEST_F(IoTest, PayloadErrors) {
  auto items = Write("x.txt", "a\nb\n");
  EXPECT_THROW(LoadItems(items, Write("p1.txt", "1\n")), IoError);
  EXPECT_THROW(LoadItems(items, Write("p2.txt", "1\nfoo\n")), IoError);
  EXPECT_THROW(LoadItems(items, Write("p3.txt", "1\n2x\n")), IoError);
  EXPECT_THROW(LoadItems((dir_ / "missing.txt").string()), IoError);
}

}  // namespace
}  // namespace dppsi::io
