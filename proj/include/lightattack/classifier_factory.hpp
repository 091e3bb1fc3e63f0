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

#ifndef LIGHTATTACK_CLASSIFIER_FACTORY_HPP
#define LIGHTATTACK_CLASSIFIER_FACTORY_HPP

#include <cstdlib>
#include <memory>
#include <string>

#include "bridge_client.hpp"
#include "classifier.hpp"
#include "fixtures.hpp"

namespace lightattack {

/// Environment variable naming the external classifier endpoint.
inline constexpr const char* kClassifierEnv = "LIGHTATTACK_CLASSIFIER";

/// Selector syntax: "builtin", "model:<path>", "tcp:<host>:<port>", "exec:<command>".
inline std::unique_ptr<Classifier> make_classifier(const std::string& selector)
{
    if (selector == "builtin")
        return std::make_unique<CentroidClassifier>(fixtures::builtin_model());
    if (selector.rfind("model:", 0) == 0) {
        const auto bytes = read_file_bytes(selector.substr(6));
        return std::make_unique<CentroidClassifier>(model_from_json(std::string(bytes.begin(), bytes.end())));
    }
    return std::make_unique<BridgeClassifier>(selector);
}

/// Flag beats environment beats config file.
inline std::string resolve_classifier_selector(const std::string& flag_value, const std::string& config_value)
{
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv(kClassifierEnv); env != nullptr && *env != '\0')
        return env;
    return config_value;
}

} // namespace lightattack

#endif // LIGHTATTACK_CLASSIFIER_FACTORY_HPP
