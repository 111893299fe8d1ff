#ifndef BCLF_RNG_HPP
#define BCLF_RNG_HPP

#include <array>
#include <cstdint>

namespace bclf::rng {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). The integer
// stream is bit-exact across platforms, which is what makes seeded
// experiments comparable between machines. Distribution layers below are
// written against the raw stream only, never against std:: distributions,
// whose output is implementation-defined.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);
};

// Stream identifiers partition the counter space so that independent parts
// of a run (data generation, criterion sampling, forecasting) never reuse
// random numbers, and replicate r is reproducible in isolation.
enum class Domain : std::uint8_t {
  data = 0,
  selection = 1,
  forecast = 2,
  test = 3,
};

std::uint64_t stream_id(std::uint32_t replicate, Domain domain, std::uint32_t index);

/// Stateful convenience wrapper over the Philox block function: a 64-bit
/// seed is the key, a 64-bit stream id selects a substream, and draws walk
/// the block counter.
class Engine {
 public:
  Engine(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform double in (0, 1]; safe under log().
  double uniform_pos();
  /// Standard normal via Box-Muller (pairs cached).
  double normal();
  /// Gamma(shape, rate) via Marsaglia-Tsang; shape and rate must be > 0.
  double gamma(double shape, double rate);
  /// Student-t with dof degrees of freedom, location 0, scale 1.
  double student_t(double dof);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  void refill();
};

}  // namespace bclf::rng

#endif  // BCLF_RNG_HPP
