#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace safemut {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream named by a path of integers under a master
/// seed, e.g. derive_seed(master, {run, step, retry}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

/// n draws of N(0, sigma^2).
std::vector<double> gaussian_vector(std::size_t n, double sigma, Rng& rng);

}  // namespace safemut
