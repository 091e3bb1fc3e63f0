// Copyright 2026 The lightattack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lightattack/lightattack.hpp"

using namespace lightattack;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Fixtures, BundledFilesMatchGenerator)
{
    const fs::path out = fs::temp_directory_path() / ("la_fix_" + std::to_string(::getpid()));
    const std::string cmd = std::string(LIGHTATTACK_MAKE_FIXTURES) + " " + out.string();
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        const fs::path bundled = fs::path(LIGHTATTACK_FIXTURE_DIR) / e.path().filename();
        ASSERT_TRUE(fs::exists(bundled)) << bundled;
        EXPECT_EQ(slurp(e.path()), slurp(bundled)) << e.path().filename();
        ++n;
    }
    EXPECT_EQ(n, 10u * 2u + 2u);
    fs::remove_all(out);
}

TEST(Fixtures, AliasesAndConfigsLoad)
{
    EXPECT_EQ(fixtures::named_scene("susceptible").true_class, 5);
    EXPECT_EQ(fixtures::named_scene("invariant").true_class, 1);
    EXPECT_EQ(fixtures::named_scene("frog").true_class, 6);
    EXPECT_THROW(fixtures::named_scene("unicorn"), IndexOutOfRange);

    for (const char* name : {"susceptible", "invariant", "cat"}) {
        const auto lc = load_experiment_config((fs::path(LIGHTATTACK_FIXTURE_DIR) / (std::string(name) + ".cfg")).string());
        const auto f = fixtures::named_scene(name);
        EXPECT_EQ(lc.config.scene.true_class, f.true_class);
        EXPECT_EQ(lc.config.scene.ambient, f.ambient);
        EXPECT_EQ(quantize(lc.config.scene.reflectance), f.reflectance);
    }
}

TEST(Fixtures, ReflectanceIsValidAndNonTrivial)
{
    for (int c = 0; c < 10; ++c) {
        const auto f = fixtures::class_scene(c);
        EXPECT_EQ(f.reflectance.height, 64);
        EXPECT_EQ(f.reflectance.width, 64);
        EXPECT_NO_THROW(validate(fixtures::to_scene(f)));
        std::set<std::uint8_t> distinct(f.reflectance.data.begin(), f.reflectance.data.end());
        EXPECT_GT(distinct.size(), 3u);
    }
}

TEST(Fixtures, TrainingSetShape)
{
    const auto set = fixtures::training_set();
    ASSERT_EQ(set.size(), 50u);
    for (int c = 0; c < 10; ++c)
        EXPECT_EQ(set[static_cast<std::size_t>(c * 5)].label, c);
}
