#include "doctest.h"

#include <cmath>
#include <set>

#include "urlab/rng.hpp"

using namespace urlab;

TEST_CASE("philox known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and disjoint") {
  Stream a(7, 3, StreamRole::innovations);
  Stream b(7, 3, StreamRole::innovations);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::uint64_t rep : {0u, 1u, 1u << 20}) {
      for (auto role : {StreamRole::innovations, StreamRole::brownian_a, StreamRole::brownian_b}) {
        Stream s(seed, rep, role);
        firsts.insert(s());
      }
    }
  }
  CHECK(firsts.size() == 18);
}

TEST_CASE("discard_blocks matches sequential draws") {
  Stream a(11, 0, StreamRole::diagnostic);
  for (int i = 0; i < 10; ++i) a();  // 5 blocks of two words
  Stream b(11, 0, StreamRole::diagnostic);
  b.discard_blocks(5);
  CHECK(a.block_index() == b.block_index());
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());
}

TEST_CASE("uniform stays in the open unit interval") {
  Stream s(1, 0, StreamRole::diagnostic);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}
