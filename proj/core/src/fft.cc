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

#include "sdanet/fft.h"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "sdanet/errors.h"

namespace sdanet::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

Plan::Plan(std::size_t n) : n_(n) {
  if (n == 0) throw ConfigError("fft: transform length must be positive");
  m_ = is_pow2(n) ? n : next_pow2(2 * n - 1);

  twiddles_.resize(m_ / 2);
  for (std::size_t k = 0; k < m_ / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(m_);
    twiddles_[k] = std::polar(1.0, angle);
  }
  bitrev_.resize(m_);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < m_) ++bits;
  for (std::size_t i = 0; i < m_; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }

  if (m_ != n_) {
    chirp_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      // k^2 mod 2n keeps the angle argument small and exact.
      const std::size_t k2 = (k * k) % (2 * n_);
      const double angle =
          -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
      chirp_[k] = std::polar(1.0, angle);
    }
    chirp_filter_.assign(m_, Complex{});
    chirp_filter_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      chirp_filter_[k] = std::conj(chirp_[k]);
      chirp_filter_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(chirp_filter_);
  }
}

void Plan::radix2(std::span<Complex> a) const {
  const std::size_t m = a.size();
  for (std::size_t i = 0; i < m; ++i)
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  for (std::size_t len = 2; len <= m; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = m / len;
    for (std::size_t i = 0; i < m; i += len)
      for (std::size_t j = 0; j < half; ++j) {
        const Complex t = twiddles_[j * step] * a[i + j + half];
        a[i + j + half] = a[i + j] - t;
        a[i + j] += t;
      }
  }
}

void Plan::bluestein(std::span<Complex> data) const {
  std::vector<Complex> work(m_, Complex{});
  for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * chirp_[k];
  radix2(work);
  for (std::size_t k = 0; k < m_; ++k) work[k] *= chirp_filter_[k];
  // Inverse of the padded transform via conjugation.
  for (auto& v : work) v = std::conj(v);
  radix2(work);
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < n_; ++k)
    data[k] = std::conj(work[k]) * inv_m * chirp_[k];
}

void Plan::forward(std::span<Complex> data) const {
  if (data.size() != n_) throw DimensionError("fft: buffer length mismatch");
  if (n_ == 1) return;
  if (m_ == n_) {
    radix2(data);
  } else {
    bluestein(data);
  }
}

void Plan::inverse(std::span<Complex> data) const {
  for (auto& v : data) v = std::conj(v);
  forward(data);
  for (auto& v : data) v = std::conj(v);
}

const Plan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

}  // namespace sdanet::fft
