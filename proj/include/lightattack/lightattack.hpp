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

#ifndef LIGHTATTACK_LIGHTATTACK_HPP
#define LIGHTATTACK_LIGHTATTACK_HPP

#include "bridge_client.hpp"
#include "classifier.hpp"
#include "classifier_factory.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "harness.hpp"
#include "imaging.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "scene.hpp"

#endif // LIGHTATTACK_LIGHTATTACK_HPP
