#pragma once

#include <array>
#include <cstdint>

namespace wfr {

// Philox-4x32-10 block function (Salmon et al.), the counter-based generator
// behind every random draw in the library.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// What a stream is used for. Part of the stream id so that, e.g., the
// initial-state draw and the first EM step of particle k never share bits.
enum class StreamPurpose : std::uint64_t {
  init = 1,
  em_step = 2,
  resample = 3,
  jump = 4,
  ula_step = 5,
  baseline = 6,
  diagnostic = 7,
};

// Packs (purpose, step, particle) into a 64-bit stream id:
// 4 bits purpose | 28 bits step | 32 bits particle. Throws invalid_argument
// if step or particle overflow their fields.
std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t step, std::uint64_t particle);

// A stateless-by-construction random stream: the value of draw i depends only
// on (seed, stream_id, i), so results do not depend on thread scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t step, std::uint64_t particle)
      : RngStream(seed, make_stream_id(purpose, step, particle)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t draw_index() const noexcept { return draw_; }

  // 64-bit word number `draw_index` of this stream.
  std::uint64_t word(std::uint64_t draw_index) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open0();
  // Standard normal via Box-Muller; consumes two words per pair of normals.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t draw_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wfr
