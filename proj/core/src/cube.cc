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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "binary_io.h"
#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {

namespace {

constexpr char kCubeMagic[4] = {'H', 'S', 'I', '1'};

std::size_t checked_count(std::uint32_t h, std::uint32_t w, std::uint32_t b,
                          const char* what) {
  if (h == 0 || w == 0 || b == 0) {
    throw DimensionError(std::string(what) + ": extents must be positive, got " +
                         std::to_string(h) + "x" + std::to_string(w) + "x" +
                         std::to_string(b));
  }
  return static_cast<std::size_t>(h) * w * b;
}

}  // namespace

HsiCube::HsiCube(std::uint32_t h, std::uint32_t w, std::uint32_t b,
                 std::string n)
    : height(h), width(w), bands(b),
      values(checked_count(h, w, b, "HsiCube"), 0.0f), name(std::move(n)) {}

void HsiCube::validate() const {
  const std::size_t expected = checked_count(height, width, bands, "HsiCube");
  if (values.size() != expected) {
    throw DimensionError("HsiCube '" + name + "': " +
                         std::to_string(values.size()) + " values for " +
                         std::to_string(expected) + " elements");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = values[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw DomainError("HsiCube '" + name + "': value " + std::to_string(v) +
                        " at element " + std::to_string(i) +
                        " outside [0, 1]");
    }
  }
}

bool operator==(const HsiCube& a, const HsiCube& b) {
  return a.height == b.height && a.width == b.width && a.bands == b.bands &&
         a.name == b.name && a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(),
                     a.values.size() * sizeof(float)) == 0;
}

std::string cube_bytes(const HsiCube& cube) {
  cube.validate();
  if (cube.name.size() > 0xFFFF) {
    throw ConfigError("cube name longer than 65535 bytes");
  }
  detail::ByteWriter w;
  w.put_bytes(std::string_view(kCubeMagic, 4));
  w.put<std::uint32_t>(cube.height);
  w.put<std::uint32_t>(cube.width);
  w.put<std::uint32_t>(cube.bands);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(cube.name.size()));
  w.put_bytes(cube.name);
  w.put_bytes(std::string_view(reinterpret_cast<const char*>(cube.values.data()),
                               cube.values.size() * sizeof(float)));
  return w.take();
}

HsiCube cube_from_bytes(std::string_view bytes) {
  detail::ByteReader r(bytes, "cube");
  if (r.take(4, "magic") != std::string_view(kCubeMagic, 4)) {
    throw FormatError("cube: bad magic at offset 0 (expected \"HSI1\")");
  }
  const std::size_t dims_offset = r.offset();
  const auto h = r.get<std::uint32_t>("height");
  const auto w = r.get<std::uint32_t>("width");
  const auto b = r.get<std::uint32_t>("bands");
  if (h == 0 || w == 0 || b == 0) {
    throw FormatError("cube: zero extent in header at offset " +
                      std::to_string(dims_offset));
  }
  const auto name_len = r.get<std::uint16_t>("name length");
  HsiCube cube;
  cube.height = h;
  cube.width = w;
  cube.bands = b;
  cube.name = std::string(r.take(name_len, "name"));
  const std::size_t count = static_cast<std::size_t>(h) * w * b;
  const std::size_t payload_offset = r.offset();
  if (r.remaining() / sizeof(float) < count) {
    throw FormatError("cube: truncated payload at offset " +
                      std::to_string(payload_offset) + " (need " +
                      std::to_string(count * sizeof(float)) + " bytes, have " +
                      std::to_string(r.remaining()) + ")");
  }
  const std::string_view payload = r.take(count * sizeof(float), "payload");
  cube.values.resize(count);
  std::memcpy(cube.values.data(), payload.data(), payload.size());
  if (r.remaining() != 0) {
    throw FormatError("cube: " + std::to_string(r.remaining()) +
                      " trailing bytes at offset " + std::to_string(r.offset()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const float v = cube.values[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw FormatError("cube: value " + std::to_string(v) + " at offset " +
                        std::to_string(payload_offset + i * sizeof(float)) +
                        " outside [0, 1]");
    }
  }
  return cube;
}

void save_cube(const HsiCube& cube, const std::string& path) {
  detail::write_file(path, cube_bytes(cube));
}

HsiCube load_cube(const std::string& path) {
  return cube_from_bytes(detail::read_file(path));
}

HsiCube import_raw(const std::string& path, std::uint32_t height,
                   std::uint32_t width, std::uint32_t bands, std::string name) {
  HsiCube cube(height, width, bands, std::move(name));
  const std::string bytes = detail::read_file(path);
  const std::size_t need = cube.values.size() * sizeof(float);
  if (bytes.size() != need) {
    throw FormatError("raw cube '" + path + "': " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(need));
  }
  std::memcpy(cube.values.data(), bytes.data(), need);
  for (std::size_t i = 0; i < cube.values.size(); ++i) {
    const float v = cube.values[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw FormatError("raw cube '" + path + "': value " + std::to_string(v) +
                        " at offset " + std::to_string(i * sizeof(float)) +
                        " outside [0, 1]");
    }
  }
  return cube;
}

Tensor cube_to_tensor(const HsiCube& cube) {
  std::vector<double> values(cube.values.begin(), cube.values.end());
  return Tensor({cube.bands, cube.height, cube.width}, std::move(values));
}

HsiCube tensor_to_cube(const Tensor& image, std::string name) {
  if (image.rank() != 3) {
    throw DimensionError("tensor_to_cube: expected (B, H, W), got " +
                         shape_string(image.shape()));
  }
  HsiCube cube(static_cast<std::uint32_t>(image.dim(1)),
               static_cast<std::uint32_t>(image.dim(2)),
               static_cast<std::uint32_t>(image.dim(0)), std::move(name));
  auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = std::isfinite(src[i]) ? std::clamp(src[i], 0.0, 1.0) : 0.0;
    cube.values[i] = static_cast<float>(v);
  }
  return cube;
}

Tensor stack_cubes(std::span<const HsiCube* const> cubes) {
  if (cubes.empty()) throw ContractError("stack_cubes: no cubes given");
  const HsiCube& first = *cubes.front();
  const std::size_t per = first.values.size();
  std::vector<double> values;
  values.reserve(per * cubes.size());
  for (const HsiCube* c : cubes) {
    if (c->height != first.height || c->width != first.width ||
        c->bands != first.bands) {
      throw DimensionError("stack_cubes: cube '" + c->name + "' extents differ");
    }
    values.insert(values.end(), c->values.begin(), c->values.end());
  }
  return Tensor({cubes.size(), first.bands, first.height, first.width},
                std::move(values));
}

}  // namespace sdanet
