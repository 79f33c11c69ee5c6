/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <string>

#include "binary_io.h"
#include "sdanet/errors.h"
#include "sdanet/model.h"

namespace sdanet {

namespace {
constexpr std::string_view kMagic = "SDAN";
}  // namespace

std::string checkpoint_bytes(const SdanetModel& model) {
  detail::ByteWriter w;
  w.put_bytes(kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  const SdanetConfig& c = model.config;
  for (std::uint32_t v : {c.bands, c.feat_channels, c.num_blocks, c.scale, c.seed})
    w.put<std::uint32_t>(v);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.parameters.size()));
  for (const Parameter& p : model.parameters) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(p.name.size()));
    w.put_bytes(p.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p.value.rank()));
    for (std::size_t extent : p.value.shape())
      w.put<std::uint32_t>(static_cast<std::uint32_t>(extent));
    for (double v : p.value.data()) w.put<double>(v);
  }
  return w.take();
}

SdanetModel model_from_checkpoint(std::string_view bytes, Variant variant) {
  detail::ByteReader r(bytes, "checkpoint");
  if (r.take(4, "magic") != kMagic) {
    throw FormatError("checkpoint: bad magic at offset 0 (expected \"SDAN\")");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(version) + " at offset 4");
  }
  SdanetConfig config;
  config.bands = r.get<std::uint32_t>("config.bands");
  config.feat_channels = r.get<std::uint32_t>("config.feat_channels");
  config.num_blocks = r.get<std::uint32_t>("config.num_blocks");
  config.scale = r.get<std::uint32_t>("config.scale");
  config.seed = r.get<std::uint32_t>("config.seed");
  config.variant = variant;
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: invalid configuration at offset 8: ") +
                      e.what());
  }
  SdanetModel model = init_params(config);
  const std::size_t count_offset = r.offset();
  const auto count = r.get<std::uint32_t>("parameter count");
  if (count != model.parameters.size()) {
    throw FormatError("checkpoint: parameter count " + std::to_string(count) +
                      " at offset " + std::to_string(count_offset) +
                      " does not match the configuration (" +
                      std::to_string(model.parameters.size()) + ")");
  }
  for (Parameter& p : model.parameters) {
    const std::size_t entry = r.offset();
    const auto len = r.get<std::uint16_t>("name length");
    const std::string_view name = r.take(len, "name");
    if (name != p.name) {
      throw FormatError("checkpoint: expected parameter '" + p.name +
                        "' at offset " + std::to_string(entry) + ", found '" +
                        std::string(name) + "'");
    }
    const auto rank = r.get<std::uint8_t>("rank");
    Shape shape(rank);
    for (auto& extent : shape) extent = r.get<std::uint32_t>("extent");
    if (shape != p.value.shape()) {
      throw FormatError("checkpoint: parameter '" + p.name + "' at offset " +
                        std::to_string(entry) + " has shape " +
                        shape_string(shape) + ", expected " +
                        shape_string(p.value.shape()));
    }
    for (double& v : p.value.data()) {
      const std::size_t at = r.offset();
      v = r.get<double>("parameter value");
      if (!std::isfinite(v)) {
        throw FormatError("checkpoint: non-finite value at offset " +
                          std::to_string(at));
      }
    }
  }
  if (r.remaining() != 0) {
    throw FormatError("checkpoint: " + std::to_string(r.remaining()) +
                      " trailing bytes at offset " + std::to_string(r.offset()));
  }
  return model;
}

void save_checkpoint(const SdanetModel& model, const std::string& path) {
  detail::write_file(path, checkpoint_bytes(model));
}

SdanetModel load_checkpoint(const std::string& path, Variant variant) {
  std::string bytes;
  try {
    bytes = detail::read_file(path);
  } catch (const IoError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return model_from_checkpoint(bytes, variant);
}

}  // namespace sdanet
