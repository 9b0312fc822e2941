#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "forge/boxes.hpp"

using namespace forge;

namespace {

struct Mix64 {
  std::uint64_t state;
  explicit Mix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  long long below(long long n) {
    return static_cast<long long>(next() % static_cast<std::uint64_t>(n));
  }
};

Rational q(long long n, long long d) { return Rational(Bigint(n), Bigint(d)); }

std::vector<Rational> corners(int d, const Rational& x) {
  return std::vector<Rational>(static_cast<std::size_t>(d), x);
}

}  // namespace

TEST_CASE("build_rigid_tile_boxes validates its parameters by inequality") {
  CHECK_THROWS_WITH_AS(build_rigid_tile_boxes(2, q(0, 1), corners(2, q(1, 3))),
                       doctest::Contains("0 < eps violated"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_rigid_tile_boxes(2, q(1, 5), corners(2, q(1, 3))),
                       doctest::Contains("eps < 1/5 violated"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_rigid_tile_boxes(2, q(1, 8), corners(2, q(1, 4))),
                       doctest::Contains("2*eps < x_j violated"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_rigid_tile_boxes(2, q(1, 8), corners(2, q(5, 8))),
                       doctest::Contains("x_j < 1 - 3*eps violated"),
                       std::invalid_argument);
  CHECK_THROWS_AS(build_rigid_tile_boxes(0, q(1, 8), {}), std::invalid_argument);
  CHECK_THROWS_AS(build_rigid_tile_boxes(2, q(1, 8), corners(1, q(1, 3))),
                  std::invalid_argument);
}

TEST_CASE("build_rigid_tile_boxes has unit volume and paired notches") {
  for (int d = 1; d <= 3; ++d) {
    BoxRegion r = build_rigid_tile_boxes(d, q(1, 8), corners(d, q(1, 3)));
    CHECK(r.dimension == d);
    CHECK(static_cast<int>(r.boxes.size()) == 1 + 2 * d);
    CHECK(region_volume(r) == Rational(1));
    for (int k = 0; k < d; ++k) {
      const SignedBox& cut = r.boxes[static_cast<std::size_t>(1 + 2 * k)];
      const SignedBox& lid = r.boxes[static_cast<std::size_t>(2 + 2 * k)];
      CHECK(cut.sign == -1);
      CHECK(lid.sign == 1);
      CHECK(cut.pair_id == k);
      CHECK(lid.pair_id == k);
      // The lid is the cut shifted one unit along axis k.
      for (int j = 0; j < d; ++j) {
        Rational shift = (j == k) ? Rational(1) : Rational(0);
        CHECK(lid.bounds[static_cast<std::size_t>(j)][0] ==
              cut.bounds[static_cast<std::size_t>(j)][0] + shift);
        CHECK(lid.bounds[static_cast<std::size_t>(j)][1] ==
              cut.bounds[static_cast<std::size_t>(j)][1] + shift);
      }
    }
  }
}

TEST_CASE("indicator_at sees the notch as moved, not removed") {
  BoxRegion r = build_rigid_tile_boxes(1, q(1, 8), corners(1, q(1, 3)));
  // In dimension 1 the notch is [0, eps), re-attached as [1, 1 + eps).
  CHECK(indicator_at(r.boxes, {q(0, 1)}) == 0);
  CHECK(indicator_at(r.boxes, {q(1, 16)}) == 0);
  CHECK(indicator_at(r.boxes, {q(1, 8)}) == 1);
  CHECK(indicator_at(r.boxes, {q(1, 2)}) == 1);
  CHECK(indicator_at(r.boxes, {q(1, 1)}) == 1);
  CHECK(indicator_at(r.boxes, {q(17, 16)}) == 1);
  CHECK(indicator_at(r.boxes, {q(9, 8)}) == 0);
}

TEST_CASE("sweep_indicator reports cancellation cell by cell") {
  SignedBox big{{ {q(0, 1), q(2, 1)} }, 1, -1};
  SignedBox cut{{ {q(0, 1), q(1, 1)} }, -1, -1};
  SweepReport rep = sweep_indicator({big, cut}, {{q(0, 1), q(2, 1)}});
  CHECK_FALSE(rep.exact);
  CHECK(rep.cells_checked == 2);
  CHECK(rep.cells_zero == 1);
  CHECK(rep.cells_one == 1);
  CHECK(rep.cells_multiple == 0);
  REQUIRE(rep.witness.size() == 1);
  CHECK(rep.witness[0] == Rational(0));

  CHECK_THROWS_AS(sweep_indicator({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_indicator({}, {{q(1, 1), q(0, 1)}}),
                  std::invalid_argument);
}

TEST_CASE("sweep_indicator agrees with dense point sampling") {
  Mix64 rng(0xb0c5ULL);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<SignedBox> boxes;
    int count = 3 + static_cast<int>(rng.below(4));
    for (int b = 0; b < count; ++b) {
      SignedBox box;
      for (int a = 0; a < 2; ++a) {
        long long lo = rng.below(15);
        long long hi = lo + 1 + rng.below(16 - lo - 1);
        box.bounds.push_back({q(lo, 4), q(hi, 4)});
      }
      box.sign = rng.below(2) == 0 ? 1 : -1;
      boxes.push_back(box);
    }
    std::vector<std::array<Rational, 2>> window{{q(0, 1), q(4, 1)},
                                                {q(0, 1), q(4, 1)}};
    SweepReport rep = sweep_indicator(boxes, window);

    // Every eighth-cell is uniform (all edges are quarters), so sampling
    // cell centres recovers exactly which indicator values occur.
    bool any_zero = false, any_one = false, any_multi = false, any_neg = false;
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) {
        long long v = indicator_at(
            boxes, {q(2 * i + 1, 16), q(2 * j + 1, 16)});
        any_zero |= v == 0;
        any_one |= v == 1;
        any_multi |= v > 1;
        any_neg |= v < 0;
      }
    CHECK((rep.cells_zero > 0) == any_zero);
    CHECK((rep.cells_one > 0) == any_one);
    CHECK((rep.cells_multiple > 0) == any_multi);
    CHECK((rep.cells_negative > 0) == any_neg);
    CHECK(rep.exact == (any_one && !any_zero && !any_multi && !any_neg));
  }
}

TEST_CASE("sweep_indicator refuses oversized compressed grids") {
  std::vector<SignedBox> boxes;
  for (long long i = 0; i < 301; ++i) {
    SignedBox b;
    for (int a = 0; a < 3; ++a) b.bounds.push_back({q(i, 1), q(i + 1, 1)});
    boxes.push_back(b);
  }
  std::vector<std::array<Rational, 2>> window(
      3, std::array<Rational, 2>{q(0, 1), q(301, 1)});
  CHECK_THROWS_AS(sweep_indicator(boxes, window), std::length_error);
}

TEST_CASE("the notched cube tiles under integer translations") {
  BoxRegion r1 = build_rigid_tile_boxes(1, q(1, 8), corners(1, q(1, 3)));
  CHECK(verify_box_lattice_tiling(r1, {}, {{q(-1, 1), q(2, 1)}}).exact);

  BoxRegion r2 = build_rigid_tile_boxes(2, q(1, 8), corners(2, q(1, 3)));
  SweepReport rep2 = verify_box_lattice_tiling(
      r2, {}, {{q(-1, 1), q(2, 1)}, {q(-1, 1), q(2, 1)}});
  CHECK(rep2.exact);

  BoxRegion r3 = build_rigid_tile_boxes(3, q(1, 8), corners(3, q(2, 5)));
  SweepReport rep3 = verify_box_lattice_tiling(
      r3, {},
      {{q(-1, 2), q(3, 2)}, {q(-1, 2), q(3, 2)}, {q(-1, 2), q(3, 2)}});
  CHECK(rep3.exact);
}

TEST_CASE("wrong lattices fail with overlaps or gaps") {
  BoxRegion r2 = build_rigid_tile_boxes(2, q(1, 8), corners(2, q(1, 3)));
  SweepReport dense = verify_box_lattice_tiling(
      r2, {{q(1, 2), q(0, 1)}, {q(0, 1), q(1, 1)}},
      {{q(0, 1), q(2, 1)}, {q(0, 1), q(2, 1)}});
  CHECK_FALSE(dense.exact);
  CHECK(dense.cells_multiple > 0);

  SweepReport sparse = verify_box_lattice_tiling(
      r2, {{q(2, 1), q(0, 1)}, {q(0, 1), q(1, 1)}},
      {{q(0, 1), q(2, 1)}, {q(0, 1), q(2, 1)}});
  CHECK_FALSE(sparse.exact);
  CHECK(sparse.cells_zero > 0);

  CHECK_THROWS_AS(
      verify_box_lattice_tiling(r2, {{q(1, 1), q(0, 1)}, {q(2, 1), q(0, 1)}},
                           {{q(0, 1), q(2, 1)}, {q(0, 1), q(2, 1)}}),
      std::invalid_argument);  // singular basis
}

TEST_CASE("lift_discrete_tile joins disjoint integer translates") {
  BoxRegion r1 = build_rigid_tile_boxes(1, q(1, 8), corners(1, q(1, 3)));
  BoxRegion sigma = lift_discrete_tile(r1, {{0}, {1}});
  CHECK(sigma.boxes.size() == 6);
  CHECK(region_volume(sigma) == Rational(2));

  // The lifted region tiles the line under 2Z; checked on [0, 8].
  SweepReport rep =
      verify_box_lattice_tiling(sigma, {{q(2, 1)}}, {{q(0, 1), q(8, 1)}});
  CHECK(rep.exact);

  BoxRegion fat;
  fat.dimension = 1;
  fat.boxes.push_back(SignedBox{{ {q(0, 1), q(3, 2)} }, 1, -1});
  CHECK_THROWS_WITH_AS(lift_discrete_tile(fat, {{0}, {1}}),
                       doctest::Contains("translates overlap"),
                       std::runtime_error);
  CHECK_THROWS_AS(lift_discrete_tile(r1, {}), std::invalid_argument);
}

TEST_CASE("translate_region shifts bounds exactly") {
  BoxRegion r = build_rigid_tile_boxes(2, q(1, 8), corners(2, q(1, 3)));
  BoxRegion moved = translate_region(r, {q(1, 2), q(-3, 1)});
  CHECK(moved.boxes[0].bounds[0][0] == q(1, 2));
  CHECK(moved.boxes[0].bounds[1][1] == q(-2, 1));
  CHECK(region_volume(moved) == Rational(1));
  CHECK_THROWS_AS(translate_region(r, {q(1, 2)}), std::invalid_argument);
}
