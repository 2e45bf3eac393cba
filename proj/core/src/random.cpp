#include "safemut/random.hpp"

namespace safemut {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

std::vector<double> gaussian_vector(std::size_t n, double sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

}  // namespace safemut
