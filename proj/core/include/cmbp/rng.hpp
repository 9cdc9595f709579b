#pragma once

#include <cmath>
#include <cstdint>

namespace cmbp {

// splitmix64 finalizer; also used as the hash step for stream derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based pseudo random stream.
//
// A stream is identified by an immutable derivation key; drawing advances
// only the counter. Substreams are derived from the key alone, never from
// the counter, so the draws already consumed by a parent stream have no
// effect on any substream. This is what makes trajectories reproducible
// under arbitrary thread schedules: stream (master_seed, stream_id) and its
// per-(generation, lane) substreams are pure functions of those integers.
class RngStream {
 public:
  RngStream() : key_(0), ctr_(0) {}

  static RngStream from_root(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t k = fold(fold(0x6d626370637472ULL, master_seed), stream_id);
    return RngStream(k);
  }

  // Child stream keyed by up to three tags. Independent of draw position.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return RngStream(fold(fold(fold(key_, a), b), c));
  }

  std::uint64_t next_u64() {
    ctr_ += 0x9e3779b97f4a7c15ULL;
    return mix64(ctr_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_unit_pos() { return 1.0 - next_unit(); }

  // Standard normal via Box-Muller (cosine branch only; no cached state,
  // so the j-th normal is a pure function of the j-th uniform pair).
  double next_normal() {
    double u1 = next_unit_pos();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  explicit RngStream(std::uint64_t key) : key_(key), ctr_(mix64(key ^ 0x9e3779b97f4a7c15ULL)) {}

  static std::uint64_t fold(std::uint64_t h, std::uint64_t v) {
    return mix64((h + 0x9e3779b97f4a7c15ULL) ^ mix64(v + 0x2545f4914f6cdd1dULL));
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace cmbp
