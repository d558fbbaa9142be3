#pragma once

// Test-only reference for dcov_n: the order-6 V-statistic of the kernel
//
//   h'(z1..z6) = [a(1,2) - a(1,3) - a(2,4) + a(3,4)] * [b(1,2) - b(1,5) - b(2,6) + b(5,6)]
//
// averaged over all n^6 index tuples. Not included by reldcor.hpp.

#include <cstddef>
#include <vector>

#include "reldcor/common.hpp"
#include "reldcor/metric.hpp"

namespace reldcor {

inline constexpr std::size_t kOracleMaxN = 8;

inline double dcov_vstat_oracle(const PairedSample& s) {
  const std::size_t n = s.size();
  if (n > kOracleMaxN) throw InputError("dcov_vstat_oracle refuses n > 8 (cost n^6)");
  std::vector<double> a(n * n), b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = s.dx(i, j);
      b[i * n + j] = s.dy(i, j);
    }
  }
  long double total = 0.0L;
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2)
      for (std::size_t i3 = 0; i3 < n; ++i3)
        for (std::size_t i4 = 0; i4 < n; ++i4) {
          const long double fx = static_cast<long double>(a[i1 * n + i2]) - a[i1 * n + i3] - a[i2 * n + i4] +
                                 a[i3 * n + i4];
          if (fx == 0.0L) continue;
          for (std::size_t i5 = 0; i5 < n; ++i5)
            for (std::size_t i6 = 0; i6 < n; ++i6) {
              const long double fy = static_cast<long double>(b[i1 * n + i2]) - b[i1 * n + i5] -
                                     b[i2 * n + i6] + b[i5 * n + i6];
              total += fx * fy;
            }
        }
  long double denom = 1.0L;
  for (int k = 0; k < 6; ++k) denom *= static_cast<long double>(n);
  return static_cast<double>(total / denom);
}

}  // namespace reldcor
