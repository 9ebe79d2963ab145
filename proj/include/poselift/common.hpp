#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace poselift {

inline constexpr int kJointCount = 12;
inline constexpr int kPose3Size = 3 * kJointCount;
inline constexpr int kPose2Size = 2 * kJointCount;

using Pose3D = Eigen::Matrix<double, kPose3Size, 1>;
using Pose2D = Eigen::Matrix<double, kPose2Size, 1>;

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry: zero-length reference limb, collapsed local frame, ...
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PipelineError : public Error {
 public:
  using Error::Error;
};

// Iteration cap reached before the requested tolerance. Carries the last
// iterate so callers can decide whether it is still usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd iterate)
      : Error(what), last_iterate(std::move(iterate)) {}

  Eigen::VectorXd last_iterate;
};

// Deterministic random stream. mt19937_64 has a pinned sequence and the
// uniform/gaussian conversions below are explicit arithmetic, so a given seed
// produces the same values on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return state_(); }

  // integer in [0, bound)
  std::uint64_t next_index(std::uint64_t bound) { return state_() % bound; }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; one cached spare
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Thread budget for data-parallel sections; POSELIFT_THREADS overrides.
inline int thread_budget() {
  if (const char* env = std::getenv("POSELIFT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). Work items must be independent; results
// should be written to preassigned slots so the output does not depend on
// scheduling order.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int threads = std::min(thread_budget(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next(0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace poselift
