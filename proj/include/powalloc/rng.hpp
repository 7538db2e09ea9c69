// Seedable random streams. Every run owns one environment stream (channel
// gains) and one stream per user (strategy draws and experiment coins), so
// results do not change when users are re-ordered or algorithms are swapped.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace powalloc {

// splitmix64 step; used to derive independent stream seeds from a master seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  return mix64(master ^ mix64(stream_id + 1));
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits; avoids the
  // implementation-defined behaviour of the <random> distributions so the
  // same seed yields the same sequence everywhere.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    int k = static_cast<int>(uniform01() * n);
    return k < n ? k : n - 1;
  }

  // Category draw by cumulative walk; pmf must sum to 1.
  int sample_pmf(std::span<const double> pmf) {
    const double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      acc += pmf[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

// One environment stream plus one stream per user, all derived from a master
// seed.
class RngPool {
 public:
  RngPool(std::uint64_t master, int n_users) : env_(derive_seed(master, 0)) {
    users_.reserve(static_cast<std::size_t>(n_users));
    for (int i = 0; i < n_users; ++i) {
      users_.emplace_back(derive_seed(master, static_cast<std::uint64_t>(i) + 1));
    }
  }

  RngStream& env() { return env_; }
  RngStream& user(int i) { return users_[static_cast<std::size_t>(i)]; }
  int n_users() const { return static_cast<int>(users_.size()); }

 private:
  RngStream env_;
  std::vector<RngStream> users_;
};

}  // namespace powalloc
