// Copyright 2026 The Precis Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "precis/model.hpp"

namespace precis {

/// Canonical JSON form of a model spec (full-precision numbers; reloading
/// reproduces the parameters bit for bit).
nlohmann::json model_to_json(const ModelSpec& spec);

/// Parses a model from JSON. Throws ParseError on malformed or missing
/// fields; the result is not yet validated.
ModelSpec model_from_json(const nlohmann::json& j);

/// Reads, parses and validates a model config file. Throws ParseError with
/// the byte position for syntax errors and ValidationError (with the field
/// that failed) for invariant violations.
ModelSpec load_model_config(const std::string& path);

std::string model_to_config_string(const ModelSpec& spec);

}  // namespace precis
