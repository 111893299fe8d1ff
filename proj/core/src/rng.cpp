#include "bclf/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bclf::rng {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(const std::array<std::uint32_t, 4>& c,
                                               const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(Philox4x32::kMul0, c[0], hi0, lo0);
  mulhilo(Philox4x32::kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    if (r != 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    c = round_once(c, k);
  }
  return c;
}

std::uint64_t stream_id(std::uint32_t replicate, Domain domain, std::uint32_t index) {
  if (index >= (1u << 24)) throw std::invalid_argument("rng stream index exceeds 24 bits");
  return (static_cast<std::uint64_t>(replicate) << 32) |
         (static_cast<std::uint64_t>(domain) << 24) | index;
}

Engine::Engine(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

void Engine::refill() {
  buffer_ = Philox4x32::block(counter_, key_);
  buffer_pos_ = 0;
  if (++counter_[0] == 0) ++counter_[1];  // 64-bit block counter
}

std::uint32_t Engine::next_u32() {
  if (buffer_pos_ == 4) refill();
  return buffer_[buffer_pos_++];
}

std::uint64_t Engine::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double Engine::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Engine::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Engine::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double Engine::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma draw requires positive shape and rate");
  // Marsaglia & Tsang (2000); shape < 1 boosted through the U^{1/shape} trick.
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(uniform_pos(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

double Engine::student_t(double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t requires positive dof");
  const double z = normal();
  const double chi2 = gamma(dof / 2.0, 0.5);  // chi-square with dof df
  return z / std::sqrt(chi2 / dof);
}

}  // namespace bclf::rng
