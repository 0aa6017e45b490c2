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

#include "plas/serialize.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "plas/errors.h"

namespace plas {

Json MlpToJson(const MlpParams& params) {
  Json layers = Json::array();
  for (const Layer& layer : params.layers) {
    std::vector<double> weights;
    weights.reserve(layer.weight.size());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        weights.push_back(layer.weight(r, c));
      }
    }
    layers.push_back({{"in", layer.weight.cols()},
                      {"out", layer.weight.rows()},
                      {"activation", ActivationName(layer.activation)},
                      {"weight", weights},
                      {"bias", VectorToJson(layer.bias)}});
  }
  return {{"layer_sizes", params.layer_sizes()}, {"layers", layers}};
}

MlpParams MlpFromJson(const Json& json) {
  MlpParams params;
  try {
    for (const Json& entry : json.at("layers")) {
      const auto in = entry.at("in").get<Eigen::Index>();
      const auto out = entry.at("out").get<Eigen::Index>();
      const auto weights = entry.at("weight").get<std::vector<double>>();
      if (in <= 0 || out <= 0 ||
          static_cast<Eigen::Index>(weights.size()) != in * out) {
        throw IoError("checkpoint layer has inconsistent weight size");
      }
      Layer layer;
      layer.weight.resize(out, in);
      for (Eigen::Index r = 0; r < out; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) {
          layer.weight(r, c) = weights[r * in + c];
        }
      }
      layer.bias = VectorFromJson(entry.at("bias"));
      layer.activation = ParseActivation(entry.at("activation"));
      params.layers.push_back(std::move(layer));
    }
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed network record: ") + e.what());
  }
  params.Validate();
  if (json.contains("layer_sizes") &&
      json.at("layer_sizes").get<std::vector<int>>() != params.layer_sizes()) {
    throw IoError("checkpoint layer_sizes disagree with the stored layers");
  }
  if (!params.AllFinite()) throw IoError("checkpoint holds non-finite values");
  return params;
}

namespace {

Json GradientsToJson(const Gradients& g) {
  MlpParams shell;
  for (const LayerGrad& layer : g.layers) {
    shell.layers.push_back({layer.weight, layer.bias, Activation::kIdentity});
  }
  return MlpToJson(shell).at("layers");
}

Gradients GradientsFromJson(const Json& json, const MlpParams& like) {
  MlpParams shell = MlpFromJson(Json{{"layers", json}});
  Gradients g;
  for (Layer& layer : shell.layers) {
    g.layers.push_back({std::move(layer.weight), std::move(layer.bias)});
  }
  if (!g.CongruentWith(like)) {
    throw IoError("optimizer moments do not match the network");
  }
  return g;
}

}  // namespace

Json AdamToJson(const AdamState& state) {
  return {{"learning_rate", state.options.learning_rate},
          {"beta1", state.options.beta1},
          {"beta2", state.options.beta2},
          {"epsilon", state.options.epsilon},
          {"step", state.step},
          {"first_moment", GradientsToJson(state.first_moment)},
          {"second_moment", GradientsToJson(state.second_moment)}};
}

AdamState AdamFromJson(const Json& json, const MlpParams& params) {
  AdamState state;
  try {
    state.options.learning_rate = json.at("learning_rate");
    state.options.beta1 = json.at("beta1");
    state.options.beta2 = json.at("beta2");
    state.options.epsilon = json.at("epsilon");
    state.step = json.at("step");
    state.first_moment = GradientsFromJson(json.at("first_moment"), params);
    state.second_moment = GradientsFromJson(json.at("second_moment"), params);
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed optimizer record: ") + e.what());
  }
  return state;
}

Json VectorToJson(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector VectorFromJson(const Json& json) {
  const auto values = json.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

Json MakeCheckpoint(const std::string& kind, Json payload) {
  return {{"format", "plas-checkpoint"},
          {"version", kCheckpointVersion},
          {"kind", kind},
          {"payload", std::move(payload)}};
}

Json OpenCheckpoint(const Json& checkpoint, const std::string& kind) {
  if (!checkpoint.is_object() ||
      checkpoint.value("format", "") != "plas-checkpoint") {
    throw IoError("not a plas checkpoint");
  }
  if (checkpoint.value("version", 0) != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " +
                  checkpoint.at("version").dump());
  }
  if (checkpoint.value("kind", "") != kind) {
    throw IoError("checkpoint holds '" + checkpoint.value("kind", "") +
                  "', expected '" + kind + "'");
  }
  return checkpoint.at("payload");
}

void WriteJsonFile(const std::filesystem::path& path, const Json& json) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << json.dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string HashToHex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace plas
