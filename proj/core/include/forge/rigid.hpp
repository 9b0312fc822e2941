#pragma once

#include <cstdint>
#include <vector>

#include "forge/tiling.hpp"

namespace forge {

/**
 * A partition of Z/NZ into labelled classes E_1, ..., E_M with the
 * translation-rigidity property: every class meets every nonzero translate
 * of every class, i.e. E_i and E_j + h intersect for all i, j and all
 * h != 0 (mod N).  Such partitions pin down the vertical coordinate when a
 * system of tilings is stacked into a single tile (see stack_system).
 */
struct RigidPartition {
  long long modulus = 0;                        // N
  std::vector<std::vector<long long>> classes;  // sorted members of each E_i
};

/**
 * Checks both the partition axioms (nonempty classes, each residue in
 * exactly one class) and the rigidity property.  The rigidity check walks
 * every nonzero rotation of every class as a bitmask and intersects it with
 * every other class, which costs O(M^2 N^2 / 64) word operations.
 */
bool verify_rigid_partition(const RigidPartition& partition);

/**
 * Searches for a rigid partition into `classes` parts by randomized
 * assignment.  A single class is served by the fixed partition {Z/2Z}.
 * For two or more classes the search starts at modulus 8, makes 16 seeded
 * attempts, then doubles the modulus, giving up past 2^24.
 *
 * The assignment stream is a 64-bit mix function keyed on (classes, seed,
 * modulus, attempt), so results are reproducible.
 *
 * Throws std::invalid_argument for classes < 1 and std::runtime_error if
 * the modulus cap is exhausted.
 */
RigidPartition build_rigid_partition(int classes, std::uint64_t seed);

/** The group G x Z/NZ, with the cyclic factor appended last. */
GroupSpec extend_with_cyclic(const GroupSpec& group, long long modulus);

/** Lifts lattice generators into G x Z/NZ with a zero last coordinate. */
PeriodLattice extend_lattice(const PeriodLattice& lattice, long long modulus);

/**
 * Stacks the tiles of a system against a rigid partition: the result is
 * the disjoint union of F_m x E_m inside G x Z/NZ.  The partition must
 * have exactly one class per tile.  A set A_0 x {t} tiles the extended
 * group by the stacked tile precisely when A_0 solves every equation of
 * the original system, and rigidity forces every solution of the stacked
 * equation into that product form.
 */
Tile stack_system(const TilingSystem& system, const RigidPartition& partition);

}  // namespace forge
