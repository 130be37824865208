// Counter-based random number generation (Philox 4x64-10) plus the block
// scheduler that keeps Monte Carlo output identical for any thread count.
//
// Streams are keyed by (seed, stream): any two distinct key pairs yield
// independent sequences, so substreams never need coordination. A sampler
// that processes work in fixed-size blocks, block b drawing from
// Rng(seed, b), produces the same bytes whether run on 1 or 8 threads.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace starshape {

namespace detail {

struct U128 {
  std::uint64_t hi, lo;
};

inline U128 mul_wide(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

}  // namespace detail

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : k0_(seed), k1_(stream) {
    c_[0] = c_[1] = c_[2] = c_[3] = 0;
    pos_ = 4;  // force refill on first draw
  }

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return out_[pos_++];
  }

  // Strictly inside (0,1); safe under log() and quantile transforms.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller; generates pairs, caches the second.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01(), u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang; a < 1 boosted through gamma(a+1).
  double gamma(double a) {
    if (a < 1.0) {
      double u = uniform01();
      return gamma(a + 1.0) * std::pow(u, 1.0 / a);
    }
    double d = a - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform01();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  void refill() {
    std::uint64_t x0 = c_[0], x1 = c_[1], x2 = c_[2], x3 = c_[3];
    std::uint64_t k0 = k0_, k1 = k1_;
    for (int round = 0; round < 10; ++round) {
      detail::U128 p0 = detail::mul_wide(kM0, x0);
      detail::U128 p1 = detail::mul_wide(kM1, x2);
      std::uint64_t y0 = p1.hi ^ x1 ^ k0;
      std::uint64_t y1 = p1.lo;
      std::uint64_t y2 = p0.hi ^ x3 ^ k1;
      std::uint64_t y3 = p0.lo;
      x0 = y0; x1 = y1; x2 = y2; x3 = y3;
      k0 += kW0;
      k1 += kW1;
    }
    out_[0] = x0; out_[1] = x1; out_[2] = x2; out_[3] = x3;
    if (++c_[0] == 0 && ++c_[1] == 0 && ++c_[2] == 0) ++c_[3];
    pos_ = 0;
  }

  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;

  std::uint64_t k0_, k1_;
  std::uint64_t c_[4];
  std::uint64_t out_[4];
  int pos_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Folds a salt into a seed so nested work units (trial -> block) get fresh,
// non-overlapping key spaces. One Philox evaluation; avalanche on every bit.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ 0x5851F42D4C957F2Dull, salt);
  return r.next_u64();
}

// Runs f(block_index) for block_index in [0, n_blocks), spread over n_threads.
// Each block must touch only its own output region; ordering of side effects
// inside a block is preserved, so results are identical for any thread count.
template <class F>
inline void parallel_blocks(std::size_t n_blocks, int n_threads, F&& f) {
  if (n_threads <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) f(b);
    return;
  }
  std::vector<std::thread> pool;
  int workers = static_cast<int>(std::min<std::size_t>(n_threads, n_blocks));
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t b = w; b < n_blocks; b += workers) f(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  if (hc == 0) hc = 1;
  return static_cast<int>(hc > 8 ? 8 : hc);
}

}  // namespace starshape
