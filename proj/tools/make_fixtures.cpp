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

// Writes the bundled figurine scenes to a directory: one 64x64 reflectance
// PPM and one experiment config per class, plus susceptible/invariant aliases.
//
//   make_fixtures data/fixtures

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lightattack/lightattack.hpp"

namespace fs = std::filesystem;
using namespace lightattack;

namespace {

void write_scene(const fs::path& dir, const std::string& name, const fixtures::FixtureScene& f)
{
    const LabelSet labels = LabelSet::cifar10();
    save_ppm((dir / (f.name + ".ppm")).string(), f.reflectance);
    std::ofstream cfg(dir / (name + ".cfg"));
    cfg << "# " << name << " figurine (" << labels[static_cast<std::size_t>(f.true_class)] << ")\n"
        << "reflectance = " << f.name << ".ppm\n"
        << "ambient = " << detail::fmt_double(f.ambient[0]) << "," << detail::fmt_double(f.ambient[1]) << ","
        << detail::fmt_double(f.ambient[2]) << "\n"
        << "true_class = " << labels[static_cast<std::size_t>(f.true_class)] << "\n"
        << "master_seed = 1\n";
}

} // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: make_fixtures OUTPUT_DIR\n";
        return 2;
    }
    const fs::path dir(argv[1]);
    fs::create_directories(dir);
    for (int c = 0; c < 10; ++c) {
        const auto f = fixtures::class_scene(c);
        write_scene(dir, f.name, f);
    }
    write_scene(dir, "susceptible", fixtures::named_scene("susceptible"));
    write_scene(dir, "invariant", fixtures::named_scene("invariant"));
    return 0;
}
