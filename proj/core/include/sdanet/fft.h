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

#ifndef SDANET_FFT_H_
#define SDANET_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sdanet::fft {

using Complex = std::complex<double>;

// Unnormalized 1-D DFT of arbitrary length. Powers of two use an iterative
// radix-2 transform; every other length goes through Bluestein's chirp-z
// convolution on a padded power-of-two grid.
class Plan {
 public:
  explicit Plan(std::size_t n);

  std::size_t size() const { return n_; }

  // X[k] = sum_j x[j] exp(-2 pi i j k / n), in place.
  void forward(std::span<Complex> data) const;
  // x[j] = sum_k X[k] exp(+2 pi i j k / n), in place (no 1/n factor).
  void inverse(std::span<Complex> data) const;

 private:
  void radix2(std::span<Complex> data) const;
  void bluestein(std::span<Complex> data) const;

  std::size_t n_;
  std::size_t m_;                      // padded power-of-two length
  std::vector<Complex> twiddles_;      // exp(-2 pi i k / m_), k < m_/2
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> chirp_;         // exp(-i pi k^2 / n)
  std::vector<Complex> chirp_filter_;  // forward transform of the conj chirp
};

// Cached plan for length n (per thread).
const Plan& plan_for(std::size_t n);

}  // namespace sdanet::fft

#endif  // SDANET_FFT_H_
