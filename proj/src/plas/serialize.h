// Copyright 2026 The PLAS Authors.
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

#ifndef PLAS_SERIALIZE_H_
#define PLAS_SERIALIZE_H_

// Versioned JSON checkpoint container. Parameters are stored as row-major
// arrays of doubles; nlohmann/json prints the shortest decimal that parses
// back to the same double, so a save/load round trip is bit-exact.

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "plas/diffnet.h"

namespace plas {

using Json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

Json MlpToJson(const MlpParams& params);
MlpParams MlpFromJson(const Json& json);

Json AdamToJson(const AdamState& state);
AdamState AdamFromJson(const Json& json, const MlpParams& params);

Json VectorToJson(const Vector& v);
Vector VectorFromJson(const Json& json);

// Wraps `payload` as {"format": "plas-checkpoint", "version": 1, "kind": kind,
// "payload": payload}.
Json MakeCheckpoint(const std::string& kind, Json payload);
// Checks the envelope and returns the payload.
Json OpenCheckpoint(const Json& checkpoint, const std::string& kind);

void WriteJsonFile(const std::filesystem::path& path, const Json& json);
Json ReadJsonFile(const std::filesystem::path& path);

std::string HashToHex(std::uint64_t hash);
std::uint64_t Fnv1a64(const std::string& bytes);

}  // namespace plas

#endif  // PLAS_SERIALIZE_H_
