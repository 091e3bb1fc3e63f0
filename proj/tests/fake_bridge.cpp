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
// Stand-in classifier service speaking the bridge protocol on stdin/stdout.
// The mode argument selects well-behaved or deliberately broken replies.
//
//   fake_bridge [centroid|uniform|short|error|badjson|unnormalized|drift|wrongid|silent]

#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "lightattack/lightattack.hpp"

using namespace lightattack;

int main(int argc, char** argv)
{
    const std::string mode = argc > 1 ? argv[1] : "centroid";
    std::optional<CentroidClassifier> model;
    if (mode == "centroid")
        model.emplace(fixtures::builtin_model());

    std::string line;
    while (std::getline(std::cin, line)) {
        if (mode == "silent")
            return 0;
        nlohmann::json req;
        nlohmann::json resp;
        try {
            req = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            std::cout << R"({"error":"malformed request","id":0})" << "\n" << std::flush;
            continue;
        }
        const std::uint64_t id = req.value("id", std::uint64_t{0});
        resp["id"] = mode == "wrongid" ? id + 1 : id;
        try {
            const auto bytes = base64_decode(req.at("ppm_b64").get<std::string>());
            const Image8 img = read_ppm(bytes);
            check_classifier_size(img);
            if (mode == "centroid") {
                resp["probs"] = model->classify(img).probs;
            } else if (mode == "uniform") {
                resp["probs"] = std::vector<double>(10, 0.1);
            } else if (mode == "short") {
                resp["probs"] = std::vector<double>(9, 1.0 / 9.0);
            } else if (mode == "error") {
                resp["error"] = "model exploded";
            } else if (mode == "unnormalized") {
                resp["probs"] = std::vector<double>(10, 0.2);
            } else if (mode == "drift") {
                resp["probs"] = std::vector<double>(10, 0.10001);
            } else if (mode == "badjson") {
                std::cout << "{\"id\": " << id << ", \"probs\": [0.1,\n" << std::flush;
                continue;
            } else {
                resp["probs"] = std::vector<double>(10, 0.1);
            }
        } catch (const std::exception& e) {
            resp.erase("probs");
            resp["error"] = e.what();
        }
        std::cout << resp.dump() << "\n" << std::flush;
    }
    return 0;
}
