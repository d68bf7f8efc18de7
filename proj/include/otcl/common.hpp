#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace otcl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Weights below this are dropped from measure supports on construction.
inline constexpr double kWeightFloor = 1e-15;

// Default tolerance for the closed-form subsystems; discretized instances
// widen it to max(1e-7, 4 * snap budget).
inline constexpr double kCheckTol = 1e-8;

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Every coupling between the two marginals crosses a +inf distance.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool close(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= tol;
}

// k uniform samples of [0,1], endpoints included. k >= 2.
inline std::vector<double> uniform_grid(int k) {
  if (k < 2) throw PreconditionError("uniform_grid: need at least 2 points");
  std::vector<double> t(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) t[static_cast<size_t>(i)] = double(i) / double(k - 1);
  return t;
}

// Deterministic splittable RNG (splitmix64 core). Independent streams are
// derived per instance index so randomized sweeps parallelize without
// changing their draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo,hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  Rng split(std::uint64_t stream) const {
    Rng child(state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace otcl
