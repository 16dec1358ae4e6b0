// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_TYPES_HPP
#define PHOTHERM_TYPES_HPP

#include <atomic>
#include <complex>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/Dense>

namespace photherm {

using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Full-precision Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286;

// Thrown when a linear solve or iteration fails to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on invalid physical or geometric parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline std::atomic<int> g_max_threads{0};
}

// Worker-thread cap for row-parallel kernels; 0 means hardware concurrency.
inline void set_max_threads(int n) { detail::g_max_threads.store(n); }
inline int max_threads() {
  const int v = detail::g_max_threads.load();
  if (v > 0) return v;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace photherm

#endif  // PHOTHERM_TYPES_HPP
