#include "safemut/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "safemut/errors.hpp"

namespace safemut::harness {

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("Mann-Whitney U needs two nonempty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });

  // Midranks, plus the tie term sum(t^3 - t).
  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  MannWhitney r;
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += rank[i];
  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(nb);
  const double dn = static_cast<double>(n);
  r.u_a = rank_sum_a - dna * (dna + 1.0) / 2.0;
  r.u_b = dna * dnb - r.u_a;

  const double variance = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (n < 2 || !(variance > 0.0)) {
    r.degenerate = true;
    r.p = 1.0;
    return r;
  }
  const double mean = dna * dnb / 2.0;
  const double diff = std::max(std::abs(r.u_a - mean) - 0.5, 0.0);
  r.z = (r.u_a >= mean ? diff : -diff) / std::sqrt(variance);
  r.p = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

}  // namespace safemut::harness
