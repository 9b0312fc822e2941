#include <set>
#include <vector>

#include "doctest.h"
#include "forge/group.hpp"
#include "forge/rigid.hpp"
#include "forge/tiling.hpp"

using namespace forge;

namespace {

GroupSpec z_line() { return GroupSpec{1, {}}; }

GroupElement el(const GroupSpec& g, std::vector<long long> coords) {
  return make_element(g, std::move(coords));
}

Tile tile_z(std::initializer_list<long long> values) {
  GroupSpec g = z_line();
  std::vector<GroupElement> elems;
  for (long long v : values) elems.push_back(el(g, {v}));
  return make_tile(g, elems);
}

}  // namespace

TEST_CASE("a hand-checked two-class partition of Z/8Z is rigid") {
  // Difference sets of every ordered class pair cover all of {1,...,7}.
  RigidPartition p{8, {{0, 1, 2, 4}, {3, 5, 6, 7}}};
  CHECK(verify_rigid_partition(p));
}

TEST_CASE("no two-class partition of Z/4Z is rigid") {
  // Exhaustive: a 2-element class has only two nonzero differences, and a
  // 1-element class misses every translate of itself.
  for (unsigned mask = 0; mask < 16; ++mask) {
    RigidPartition p;
    p.modulus = 4;
    p.classes.assign(2, {});
    for (long long v = 0; v < 4; ++v)
      p.classes[(mask >> v) & 1u].push_back(v);
    CHECK_FALSE(verify_rigid_partition(p));
  }
}

TEST_CASE("verify_rigid_partition rejects malformed partitions") {
  CHECK_FALSE(verify_rigid_partition({4, {{0, 1, 2, 3}, {}}}));      // empty class
  CHECK_FALSE(verify_rigid_partition({4, {{0, 1}, {1, 2, 3}}}));     // duplicate
  CHECK_FALSE(verify_rigid_partition({4, {{0, 1}, {3}}}));           // missing 2
  CHECK_FALSE(verify_rigid_partition({4, {{0, 1, 2}, {5}}}));        // out of range
  CHECK_FALSE(verify_rigid_partition({0, {}}));
}

TEST_CASE("build_rigid_partition handles the single-class case") {
  RigidPartition p = build_rigid_partition(1, 12345);
  CHECK(p.modulus == 2);
  REQUIRE(p.classes.size() == 1);
  CHECK(p.classes[0] == std::vector<long long>{0, 1});
  CHECK(verify_rigid_partition(p));
  CHECK_THROWS_AS(build_rigid_partition(0, 1), std::invalid_argument);
}

TEST_CASE("build_rigid_partition finds rigid partitions for 2 to 4 classes") {
  for (int m = 2; m <= 4; ++m) {
    RigidPartition p = build_rigid_partition(m, 1);
    CHECK(verify_rigid_partition(p));
    CHECK(static_cast<int>(p.classes.size()) == m);
    CHECK(p.modulus >= 8);
    CHECK(p.modulus <= 1024);
    // Same seed, same partition.
    RigidPartition q = build_rigid_partition(m, 1);
    CHECK(q.modulus == p.modulus);
    CHECK(q.classes == p.classes);
  }
  RigidPartition other = build_rigid_partition(2, 99);
  CHECK(verify_rigid_partition(other));
}

TEST_CASE("extend_with_cyclic and extend_lattice append one cyclic factor") {
  GroupSpec g{2, {3}};
  GroupSpec ext = extend_with_cyclic(g, 8);
  CHECK(ext.free_rank == 2);
  CHECK(ext.torsion_orders == std::vector<long long>{3, 8});

  PeriodLattice lat{g, {el(g, {4, 0, 0}), el(g, {0, 4, 0})}};
  PeriodLattice lifted = extend_lattice(lat, 8);
  CHECK(lifted.group == ext);
  REQUIRE(lifted.generators.size() == 2);
  CHECK(lifted.generators[0].coords == std::vector<long long>{4, 0, 0, 0});
  CHECK(lifted.generators[1].coords == std::vector<long long>{0, 4, 0, 0});
  CHECK_THROWS_AS(extend_with_cyclic(g, 0), std::invalid_argument);
}

TEST_CASE("stack_system forms the disjoint union of slabs F_m x E_m") {
  TilingSystem sys{z_line(), {tile_z({0, 1}), tile_z({0, 3})}};
  RigidPartition part{8, {{0, 1, 2, 4}, {3, 5, 6, 7}}};
  Tile stacked = stack_system(sys, part);
  CHECK(stacked.group == extend_with_cyclic(z_line(), 8));
  CHECK(stacked.elements.size() == 16);
  std::set<std::vector<long long>> got;
  for (const auto& e : stacked.elements) got.insert(e.coords);
  CHECK(got.count({0, 0}) == 1);   // F_1 x E_1
  CHECK(got.count({1, 4}) == 1);
  CHECK(got.count({0, 3}) == 1);   // F_2 x E_2
  CHECK(got.count({3, 7}) == 1);
  CHECK(got.count({1, 5}) == 0);   // 1 lies in F_1 only, and 5 in E_2

  CHECK_THROWS_AS(stack_system(TilingSystem{z_line(), {}}, part),
                  std::invalid_argument);
  CHECK_THROWS_AS(stack_system(TilingSystem{z_line(), {tile_z({0})}}, part),
                  std::invalid_argument);
}

TEST_CASE("solutions of the stacked equation are exactly horizontal slices") {
  // System with solution sets {0,2} and {1,3} mod 4; stacking against a
  // rigid partition of Z/8Z must give exactly the sets A_0 x {t}.
  TilingSystem sys{z_line(), {tile_z({0, 1}), tile_z({0, 3})}};
  RigidPartition part{8, {{0, 1, 2, 4}, {3, 5, 6, 7}}};
  Tile stacked = stack_system(sys, part);

  PeriodLattice base_lat{z_line(), {el(z_line(), {4})}};
  PeriodLattice lifted = extend_lattice(base_lat, 8);
  TilingSystem stacked_sys{stacked.group, {stacked}};
  std::vector<PeriodicSet> sols = solve_tilings(stacked_sys, lifted, {});

  // 2 base solutions x 8 vertical positions.
  REQUIRE(sols.size() == 16);
  Quotient q(stacked.group, lifted);
  std::set<std::pair<std::vector<long long>, long long>> seen;
  for (const auto& a : sols) {
    std::vector<long long> base_cells;
    std::set<long long> heights;
    for (long long i = 0; i < q.size(); ++i) {
      if (!a.membership[static_cast<std::size_t>(i)]) continue;
      GroupElement rep = q.representative(i);
      base_cells.push_back(rep.coords[0]);
      heights.insert(rep.coords[1]);
    }
    // Product form: every member shares one height, and the base is a
    // solution of the original system.
    REQUIRE(heights.size() == 1);
    std::sort(base_cells.begin(), base_cells.end());
    bool is02 = base_cells == std::vector<long long>{0, 2};
    bool is13 = base_cells == std::vector<long long>{1, 3};
    CHECK((is02 || is13));
    seen.insert({base_cells, *heights.begin()});

    PeriodicSet base_set;
    base_set.lattice = base_lat;
    base_set.membership.assign(4, 0);
    for (long long c : base_cells)
      base_set.membership[static_cast<std::size_t>(c)] = 1;
    for (const auto& f : sys.tiles)
      CHECK(verify_tiling(base_set, f).exact_tiling);
  }
  CHECK(seen.size() == 16);

  // Forward direction, checked independently of the solver: each product
  // set really tiles the extended group by the stacked tile.
  for (long long t = 0; t < 8; ++t) {
    PeriodicSet a;
    a.lattice = lifted;
    a.membership.assign(static_cast<std::size_t>(q.size()), 0);
    for (long long g0 : {0LL, 2LL}) {
      GroupElement e = make_element(stacked.group, {g0, t});
      a.membership[static_cast<std::size_t>(q.index_of(e))] = 1;
    }
    CHECK(verify_tiling(a, stacked).exact_tiling);
  }
}
