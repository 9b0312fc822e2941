#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "forge/group.hpp"

using namespace forge;

namespace {

GroupSpec z(int r) { return GroupSpec{r, {}}; }

GroupSpec zmod(std::vector<long long> orders) {
  return GroupSpec{0, std::move(orders)};
}

PeriodLattice lattice_of(const GroupSpec& g,
                         std::vector<std::vector<long long>> gens) {
  PeriodLattice lat;
  lat.group = g;
  for (auto& v : gens) lat.generators.push_back(make_element(g, v));
  return lat;
}

struct Mix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t zz = (state += 0x9e3779b97f4a7c15ULL);
    zz = (zz ^ (zz >> 30)) * 0xbf58476d1ce4e5b9ULL;
    zz = (zz ^ (zz >> 27)) * 0x94d049bb133111ebULL;
    return zz ^ (zz >> 31);
  }
  long long small(long long bound) {
    return static_cast<long long>(next() % (2 * bound + 1)) - bound;
  }
};

}  // namespace

TEST_CASE("element construction reduces torsion coordinates") {
  GroupSpec g{1, {4, 6}};
  GroupElement e = make_element(g, {-3, 7, -1});
  CHECK(e.coords == std::vector<long long>{-3, 3, 5});
  CHECK(zero_element(g).coords == std::vector<long long>{0, 0, 0});
  CHECK_THROWS_AS(make_element(g, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_element(GroupSpec{0, {0}}, {1}), std::invalid_argument);
}

TEST_CASE("group addition is componentwise with wraparound") {
  GroupSpec g{1, {4}};
  GroupElement a = make_element(g, {2, 3});
  GroupElement b = make_element(g, {-5, 2});
  CHECK(add(a, b).coords == std::vector<long long>{-3, 1});
  CHECK(negate(a).coords == std::vector<long long>{-2, 1});
  CHECK(add(a, negate(a)) == zero_element(g));
  CHECK(scale(3, a).coords == std::vector<long long>{6, 1});
  GroupElement other = make_element(z(2), {1, 1});
  CHECK_THROWS_AS(add(a, other), std::invalid_argument);
}

TEST_CASE("group axioms hold on random elements") {
  GroupSpec g{2, {3, 8}};
  Mix64 rng{7};
  for (int trial = 0; trial < 200; ++trial) {
    auto rand_elem = [&] {
      return make_element(
          g, {rng.small(50), rng.small(50), rng.small(50), rng.small(50)});
    };
    GroupElement a = rand_elem(), b = rand_elem(), c = rand_elem();
    CHECK(add(a, b) == add(b, a));
    CHECK(add(add(a, b), c) == add(a, add(b, c)));
    CHECK(add(a, zero_element(g)) == a);
  }
}

TEST_CASE("quotient of Z^2 by 2Z x 2Z") {
  GroupSpec g = z(2);
  auto reps = enumerate_quotient(g, lattice_of(g, {{2, 0}, {0, 2}}));
  REQUIRE(reps.size() == 4);
  CHECK(reps[0].coords == std::vector<long long>{0, 0});
  CHECK(reps[1].coords == std::vector<long long>{0, 1});
  CHECK(reps[2].coords == std::vector<long long>{1, 0});
  CHECK(reps[3].coords == std::vector<long long>{1, 1});
}

TEST_CASE("quotient by a non-diagonal lattice") {
  GroupSpec g = z(2);
  // det [[1,0],[2,5]] = 5.
  auto reps = enumerate_quotient(g, lattice_of(g, {{1, 2}, {0, 5}}));
  CHECK(reps.size() == 5);
  Quotient q(g, lattice_of(g, {{1, 2}, {0, 5}}));
  // Every element reduces to a listed representative, consistently under
  // translation by lattice generators.
  Mix64 rng{11};
  for (int trial = 0; trial < 200; ++trial) {
    GroupElement x = make_element(g, {rng.small(40), rng.small(40)});
    GroupElement r = q.reduce(x);
    CHECK(q.reduce(add(x, make_element(g, {1, 2}))) == r);
    CHECK(q.reduce(add(x, make_element(g, {0, 5}))) == r);
    CHECK(q.index_of(x) == q.index_of(r));
    CHECK(q.representative(q.index_of(x)) == r);
  }
}

TEST_CASE("quotient of a finite group by the zero lattice") {
  GroupSpec g = zmod({4});
  auto reps = enumerate_quotient(g, lattice_of(g, {}));
  REQUIRE(reps.size() == 4);
  for (long long i = 0; i < 4; ++i)
    CHECK(reps[static_cast<std::size_t>(i)].coords ==
          std::vector<long long>{i});
}

TEST_CASE("quotient of a mixed group") {
  GroupSpec g{1, {4}};
  // Z x Z/4 modulo <(2, 1)>: index = 8.
  Quotient q(g, lattice_of(g, {{2, 1}}));
  CHECK(q.size() == 8);
  std::set<long long> seen;
  Mix64 rng{23};
  for (int trial = 0; trial < 400; ++trial) {
    GroupElement x = make_element(g, {rng.small(60), rng.small(60)});
    long long idx = q.index_of(x);
    CHECK(idx >= 0);
    CHECK(idx < 8);
    seen.insert(idx);
    CHECK(q.index_of(add(x, make_element(g, {2, 1}))) == idx);
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("infinite index is rejected") {
  GroupSpec g = z(2);
  CHECK_THROWS_WITH_AS(Quotient(g, lattice_of(g, {{2, 0}})),
                       doctest::Contains("index not finite"),
                       std::domain_error);
  CHECK_THROWS_AS(enumerate_quotient(g, lattice_of(g, {})),
                  std::domain_error);
}

TEST_CASE("quotient size equals determinant of the relation matrix") {
  Mix64 rng{31};
  GroupSpec g = z(2);
  for (int trial = 0; trial < 100; ++trial) {
    long long a = rng.small(6), b = rng.small(6);
    long long c = rng.small(6), d = rng.small(6);
    long long det = a * d - b * c;
    if (det == 0) continue;
    Quotient q(g, lattice_of(g, {{a, b}, {c, d}}));
    CHECK(q.size() == std::abs(det));
  }
}

TEST_CASE("quotient representatives are canonical under arbitrary shifts") {
  GroupSpec g{2, {6}};
  PeriodLattice lat = lattice_of(g, {{3, 1, 2}, {0, 4, 5}});
  Quotient q(g, lat);
  Mix64 rng{47};
  for (int trial = 0; trial < 300; ++trial) {
    GroupElement x =
        make_element(g, {rng.small(30), rng.small(30), rng.small(30)});
    long long k1 = rng.small(3), k2 = rng.small(3);
    GroupElement shifted = add(
        x, add(scale(k1, lat.generators[0]), scale(k2, lat.generators[1])));
    CHECK(q.index_of(shifted) == q.index_of(x));
  }
}

namespace {

WindowFunc sample_z2(const Window& w,
                     long long (*f)(long long, long long)) {
  WindowFunc wf;
  wf.group = z(2);
  wf.window = w;
  for (long long x = w.bounds[0][0]; x <= w.bounds[0][1]; ++x)
    for (long long y = w.bounds[1][0]; y <= w.bounds[1][1]; ++y)
      wf.values.push_back(f(x, y));
  return wf;
}

long long f4(long long n) {
  if (n == 0) return 1;
  while (n % 4 == 0) n /= 4;
  return ((n % 4) + 4) % 4;
}

bool contains_vector(const std::vector<PeriodLattice>& lats,
                     std::vector<long long> v) {
  for (const auto& lat : lats)
    if (lat.generators.size() == 1 && lat.generators[0].coords == v)
      return true;
  return false;
}

}  // namespace

TEST_CASE("detect_periods finds the periods of m mod 4 on a square window") {
  Window w{{{0, 63}, {0, 63}}};
  WindowFunc f = sample_z2(w, [](long long, long long m) { return m % 4; });
  auto periods = detect_periods(f, 8);
  CHECK(contains_vector(periods, {1, 0}));
  CHECK(contains_vector(periods, {0, 4}));
  CHECK_FALSE(contains_vector(periods, {0, 1}));
  CHECK_FALSE(contains_vector(periods, {0, 2}));
  // Multiples of detected primitive vectors are filtered.
  CHECK_FALSE(contains_vector(periods, {2, 0}));
  CHECK_FALSE(contains_vector(periods, {0, 8}));
}

TEST_CASE("detect_periods reports no vertical period for the digit function") {
  WindowFunc f;
  f.group = z(1);
  f.window = Window{{{-256, 256}}};
  for (long long m = -256; m <= 256; ++m) f.values.push_back(f4(m));
  auto periods = detect_periods(f, 64);
  CHECK(periods.empty());
}

TEST_CASE("detect_periods on a constant function reports all unit shifts") {
  WindowFunc f;
  f.group = z(1);
  f.window = Window{{{-20, 20}}};
  for (long long m = -20; m <= 20; ++m) f.values.push_back(7);
  auto periods = detect_periods(f, 5);
  REQUIRE(periods.size() == 1);
  CHECK(periods[0].generators[0].coords == std::vector<long long>{1});
}

TEST_CASE("detect_periods recovers a synthetic construction lattice") {
  GroupSpec g = z(2);
  PeriodLattice lat = lattice_of(g, {{3, 1}, {0, 5}});
  Quotient q(g, lat);
  Window w{{{-24, 24}, {-24, 24}}};
  WindowFunc f;
  f.group = g;
  f.window = w;
  for (long long x = w.bounds[0][0]; x <= w.bounds[0][1]; ++x)
    for (long long y = w.bounds[1][0]; y <= w.bounds[1][1]; ++y)
      f.values.push_back(q.index_of(make_element(g, {x, y})));
  auto periods = detect_periods(f, 8);
  // Both construction generators (or equivalent primitive directions)
  // must be rediscovered: check the generated vectors are periods.
  CHECK(contains_vector(periods, {3, 1}));
  CHECK(contains_vector(periods, {0, 5}));
}

TEST_CASE("detect_periods output is closed under negating generators") {
  Window w{{{0, 40}, {0, 40}}};
  WindowFunc f = sample_z2(w, [](long long n, long long m) {
    return ((n - m) % 3 + 3) % 3;
  });
  auto periods = detect_periods(f, 6);
  for (const auto& lat : periods) {
    // As a lattice, <v> contains -v; the reported generator is the
    // lexicographically positive representative.
    const auto& v = lat.generators[0].coords;
    bool positive = false;
    for (long long c : v) {
      if (c > 0) { positive = true; break; }
      if (c < 0) break;
    }
    CHECK(positive);
  }
  CHECK(contains_vector(periods, {1, 1}));
}

TEST_CASE("detect_periods rejects undersized windows") {
  WindowFunc f;
  f.group = z(1);
  f.window = Window{{{0, 9}}};
  for (int i = 0; i < 10; ++i) f.values.push_back(i % 2);
  CHECK_THROWS_WITH_AS(detect_periods(f, 8),
                       doctest::Contains("window too small"),
                       std::invalid_argument);
}
