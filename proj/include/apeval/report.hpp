/*
 * Copyright 2026 The apeval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "apeval/config.hpp"

namespace apeval {

/// Consolidated markdown report plus its JSON summary, built from the latest
/// stage outputs. Sections for stages that have not run are marked absent;
/// when nothing has run at all this throws MissingStageOutput. Best values
/// per column are bolded, second-best underlined (ties share the marker).
std::pair<std::string, nlohmann::json> render_report(const ExperimentConfig& config);

}  // namespace apeval
