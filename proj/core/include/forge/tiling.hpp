#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/group.hpp"

namespace forge {

/**
 * Finite nonempty subset of a group, with set semantics: construction
 * canonicalizes to sorted order and rejects duplicates.
 */
struct Tile {
  GroupSpec group;
  std::vector<GroupElement> elements;
};

/** Builds a tile; sorts elements, validates specs, rejects duplicates. */
Tile make_tile(const GroupSpec& g, std::vector<GroupElement> elements);

/** A simultaneous system: one translate set A must tile with every tile. */
struct TilingSystem {
  GroupSpec group;
  std::vector<Tile> tiles;
};

/**
 * Lambda-periodic subset of a group: membership flags over the coset
 * representatives of G / lattice, in Quotient enumeration order.
 */
struct PeriodicSet {
  PeriodLattice lattice;
  std::vector<char> membership;

  long long popcount() const;
};

struct MultiplicityHistogram {
  long long covered_zero = 0;
  long long covered_once = 0;
  long long covered_multiple = 0;
};

struct VerifyReport {
  bool exact_tiling = false;
  MultiplicityHistogram histogram;
  /** Necessary counting identity |A| * |F| = [G : Lambda]. */
  bool counting_identity = false;
};

/**
 * Checks the tiling equation A + F = G exactly, by counting how many
 * times each coset of G / Lambda is covered by {a + f}.
 *
 * Throws std::invalid_argument for an empty tile and std::domain_error
 * when the lattice does not have finite index.
 */
VerifyReport verify_tiling(const PeriodicSet& A, const Tile& F);

struct SolveOptions {
  /** Maximum universe size (cells x tiles) accepted by the solver. */
  long long cell_cap = 1LL << 20;
  /** Optional limit on the number of solutions collected (0 = all). */
  long long max_solutions = 0;
};

/**
 * Finds all Lambda-periodic sets A that satisfy A + F_m = G for every
 * tile simultaneously, by deterministic exact-cover backtracking:
 * columns are (coset, tile) incidences, the branching column is the
 * uncovered one with the fewest remaining candidates (ties broken by
 * smallest index), and candidate rows are tried in ascending order.
 * Solutions are returned sorted by membership vector.
 *
 * Throws std::length_error when the universe exceeds opts.cell_cap.
 */
std::vector<PeriodicSet> solve_tilings(const TilingSystem& system,
                                       const PeriodLattice& lattice,
                                       const SolveOptions& opts = {});

}  // namespace forge
