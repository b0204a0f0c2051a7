#include <doctest.h>

#include "ryd/basis.hpp"

using namespace ryd;

TEST_CASE("basis dimension and digit order") {
  const BasisIndex b(3);
  CHECK(b.dim() == 27);
  CHECK(b.n_atoms() == 3);
  // atom 0 sits in the least-significant base-3 digit
  CHECK(b.pack({1, 0, 0}) == 1);
  CHECK(b.pack({0, 1, 0}) == 3);
  CHECK(b.pack({0, 0, 2}) == 18);
  CHECK(b.pack({2, 1, 0}) == 5);
}

TEST_CASE("pack and levels are inverse") {
  const BasisIndex b(4);
  for (std::int64_t s = 0; s < b.dim(); ++s) {
    const auto lv = b.levels(s);
    REQUIRE(lv.size() == 4);
    CHECK(b.pack(lv) == s);
    for (int a = 0; a < 4; ++a) CHECK(b.level(s, a) == lv[static_cast<std::size_t>(a)]);
  }
}

TEST_CASE("with_level replaces a single digit") {
  const BasisIndex b(3);
  const auto s = b.pack({2, 0, 1});
  CHECK(b.with_level(s, 0, 0) == b.pack({0, 0, 1}));
  CHECK(b.with_level(s, 1, 2) == b.pack({2, 2, 1}));
  CHECK(b.with_level(s, 2, 1) == s);
  // untouched digits survive
  CHECK(b.level(b.with_level(s, 1, 2), 0) == 2);
  CHECK(b.level(b.with_level(s, 1, 2), 2) == 1);
}

TEST_CASE("pow3 table") {
  const BasisIndex b(5);
  std::int64_t p = 1;
  for (int k = 0; k <= 5; ++k) {
    CHECK(b.pow3(k) == p);
    p *= 3;
  }
}

TEST_CASE("basis guards") {
  CHECK_THROWS_AS(BasisIndex(0), std::invalid_argument);
  CHECK_THROWS_AS(BasisIndex(-2), std::invalid_argument);
  CHECK_THROWS_AS(BasisIndex(kMaxAtoms + 1), ResourceCapError);
  CHECK_NOTHROW(BasisIndex{kMaxAtoms});
  const BasisIndex b(2);
  CHECK_THROWS_AS(b.pack({0}), std::invalid_argument);
  CHECK_THROWS_AS(b.pack({0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(b.pack({0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(b.pack({-1, 0}), std::invalid_argument);
}
