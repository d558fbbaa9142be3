#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace reldcor {

/// Raised for malformed user input: bad samples, bad configs, missing quantiles.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(double init) : sum_(init) {}

  constexpr CompensatedSum& operator+=(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] constexpr double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed for replicate `index` of a run keyed by `master`. Independent of
/// how replicates are scheduled across threads.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(master) ^ detail::splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace reldcor
