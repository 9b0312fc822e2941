#pragma once

#include <vector>

#include "forge/tiling.hpp"

namespace forge::oracles {

/**
 * Independent brute-force tiling enumeration: tries every subset of the
 * quotient cells (up to 16 cells) and keeps those whose translates cover
 * every cell exactly once for every tile.  Used as a ground-truth
 * reference for the backtracking solver.
 */
inline std::vector<std::vector<char>> all_tilings_bruteforce(
    const TilingSystem& system, const PeriodLattice& lattice) {
  Quotient q(system.group, lattice);
  const long long cells = q.size();
  if (cells > 16)
    throw std::length_error("all_tilings_bruteforce: more than 16 cells");

  // Precompute, per candidate row, the coset it covers per (tile, element).
  std::vector<std::vector<std::vector<long long>>> covers(
      static_cast<std::size_t>(cells));
  for (long long r = 0; r < cells; ++r) {
    GroupElement a = q.representative(r);
    for (const auto& tile : system.tiles) {
      std::vector<long long> per_tile;
      for (const auto& f : tile.elements)
        per_tile.push_back(q.index_of(add(a, f)));
      covers[static_cast<std::size_t>(r)].push_back(std::move(per_tile));
    }
  }

  std::vector<std::vector<char>> solutions;
  for (unsigned long long mask = 0; mask < (1ULL << cells); ++mask) {
    bool ok = true;
    for (std::size_t t = 0; t < system.tiles.size() && ok; ++t) {
      std::vector<int> count(static_cast<std::size_t>(cells), 0);
      for (long long r = 0; r < cells && ok; ++r) {
        if (!(mask >> r & 1)) continue;
        for (long long c : covers[static_cast<std::size_t>(r)][t])
          if (++count[static_cast<std::size_t>(c)] > 1) ok = false;
      }
      for (long long c = 0; c < cells && ok; ++c)
        if (count[static_cast<std::size_t>(c)] != 1) ok = false;
    }
    if (ok) {
      std::vector<char> memb(static_cast<std::size_t>(cells), 0);
      for (long long r = 0; r < cells; ++r)
        memb[static_cast<std::size_t>(r)] = (mask >> r & 1) != 0;
      solutions.push_back(std::move(memb));
    }
  }
  return solutions;
}

}  // namespace forge::oracles
