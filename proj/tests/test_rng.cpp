#include <doctest.h>

#include <cmath>
#include <set>

#include "wfr/error.hpp"
#include "wfr/rng.hpp"

using namespace wfr;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream ids") {
  CHECK(make_stream_id(StreamPurpose::em_step, 0, 0) != make_stream_id(StreamPurpose::init, 0, 0));
  CHECK(make_stream_id(StreamPurpose::em_step, 1, 0) != make_stream_id(StreamPurpose::em_step, 0, 1));
  CHECK_THROWS_AS(make_stream_id(StreamPurpose::em_step, std::uint64_t{1} << 28, 0), Error);
  CHECK_THROWS_AS(make_stream_id(StreamPurpose::em_step, 0, std::uint64_t{1} << 32), Error);
}

TEST_CASE("streams are reproducible and position-addressable") {
  RngStream a(7, StreamPurpose::em_step, 3, 11);
  RngStream b(7, StreamPurpose::em_step, 3, 11);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(7, StreamPurpose::em_step, 3, 11);
  CHECK(c.word(5) == RngStream(7, StreamPurpose::em_step, 3, 11).word(5));
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 100; ++k) seen.insert(RngStream(7, StreamPurpose::em_step, 0, k).next_u64());
  CHECK(seen.size() == 100);
  CHECK(RngStream(8, StreamPurpose::em_step, 3, 11).next_u64() != RngStream(7, StreamPurpose::em_step, 3, 11).next_u64());
}

TEST_CASE("uniform and normal moments") {
  RngStream r(1, StreamPurpose::diagnostic, 0, 0);
  const int n = 200000;
  double su = 0.0, sz = 0.0, sz2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK_FALSE((u < 0.0 || u >= 1.0));
    su += u;
  }
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sz += z;
    sz2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sz / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sz2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  RngStream o(2, StreamPurpose::diagnostic, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = o.uniform_open0();
    CHECK_FALSE((u <= 0.0 || u > 1.0));
  }
}
