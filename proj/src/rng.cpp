#include "wfr/rng.hpp"

#include <cmath>
#include <numbers>

#include "wfr/error.hpp"

namespace wfr {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t step, std::uint64_t particle) {
  if (step >= (std::uint64_t{1} << 28)) {
    fail(ErrorKind::invalid_argument, "stream id: step index exceeds 2^28");
  }
  if (particle >= (std::uint64_t{1} << 32)) {
    fail(ErrorKind::invalid_argument, "stream id: particle index exceeds 2^32");
  }
  return (static_cast<std::uint64_t>(purpose) << 60) | (step << 32) | particle;
}

std::uint64_t RngStream::word(std::uint64_t draw_index) const {
  const std::uint64_t block = draw_index >> 1;
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32),
       static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::size_t lane = (draw_index & 1u) * 2;
  return (static_cast<std::uint64_t>(out[lane]) << 32) | out[lane + 1];
}

std::uint64_t RngStream::next_u64() { return word(draw_++); }

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv; }

double RngStream::uniform_open0() {
  return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace wfr
