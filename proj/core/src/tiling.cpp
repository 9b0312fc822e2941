#include "forge/tiling.hpp"

#include <algorithm>
#include <stdexcept>

namespace forge {

Tile make_tile(const GroupSpec& g, std::vector<GroupElement> elements) {
  g.validate();
  if (elements.empty())
    throw std::invalid_argument("make_tile: a tile must be nonempty");
  for (const auto& e : elements)
    if (e.group != g)
      throw std::invalid_argument("make_tile: element " + e.to_string() +
                                  " does not belong to " + g.to_string());
  std::sort(elements.begin(), elements.end());
  for (std::size_t i = 1; i < elements.size(); ++i)
    if (elements[i] == elements[i - 1])
      throw std::invalid_argument("make_tile: duplicate element " +
                                  elements[i].to_string());
  return Tile{g, std::move(elements)};
}

long long PeriodicSet::popcount() const {
  long long n = 0;
  for (char c : membership) n += c != 0;
  return n;
}

VerifyReport verify_tiling(const PeriodicSet& A, const Tile& F) {
  if (F.elements.empty())
    throw std::invalid_argument("verify_tiling: tile is empty");
  if (A.lattice.group != F.group)
    throw std::invalid_argument(
        "verify_tiling: translate set and tile live in different groups");
  Quotient q(A.lattice.group, A.lattice);
  if (static_cast<long long>(A.membership.size()) != q.size())
    throw std::invalid_argument(
        "verify_tiling: membership vector has " +
        std::to_string(A.membership.size()) + " entries, quotient has " +
        std::to_string(q.size()));

  std::vector<long long> coverage(static_cast<std::size_t>(q.size()), 0);
  for (long long i = 0; i < q.size(); ++i) {
    if (!A.membership[static_cast<std::size_t>(i)]) continue;
    GroupElement a = q.representative(i);
    for (const auto& f : F.elements)
      ++coverage[static_cast<std::size_t>(q.index_of(add(a, f)))];
  }

  VerifyReport report;
  report.exact_tiling = true;
  for (long long c : coverage) {
    if (c == 0) {
      ++report.histogram.covered_zero;
      report.exact_tiling = false;
    } else if (c == 1) {
      ++report.histogram.covered_once;
    } else {
      ++report.histogram.covered_multiple;
      report.exact_tiling = false;
    }
  }
  report.counting_identity =
      A.popcount() * static_cast<long long>(F.elements.size()) == q.size();
  return report;
}

namespace {

/**
 * Deterministic exact-cover search state.  Rows are coset indices (the
 * candidate members of A); columns are (tile, coset) pairs that must be
 * covered exactly once.
 */
class ExactCover {
 public:
  ExactCover(long long rows, long long cols) : row_alive_(rows, 1) {
    row_cols_.resize(static_cast<std::size_t>(rows));
    col_rows_.resize(static_cast<std::size_t>(cols));
    col_covered_.assign(static_cast<std::size_t>(cols), 0);
  }

  /**
   * Registers the columns covered by one row.  A row that covers some
   * column more than once can never appear in an exact cover, so it is
   * excluded from the search permanently.
   */
  void add_row(long long row, std::vector<long long> cols) {
    std::vector<long long> sorted = cols;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      row_alive_[static_cast<std::size_t>(row)] = 0;
      return;
    }
    for (long long c : cols)
      col_rows_[static_cast<std::size_t>(c)].push_back(row);
    row_cols_[static_cast<std::size_t>(row)] = std::move(cols);
  }

  void finalize() {
    col_remaining_.assign(col_rows_.size(), 0);
    for (std::size_t c = 0; c < col_rows_.size(); ++c)
      for (long long r : col_rows_[c])
        if (row_alive_[static_cast<std::size_t>(r)]) ++col_remaining_[c];
  }

  void search(std::vector<char>& chosen,
              std::vector<std::vector<char>>& solutions,
              long long max_solutions) {
    // Pick the uncovered column with the fewest alive candidates.
    long long best = -1;
    for (std::size_t c = 0; c < col_rows_.size(); ++c) {
      if (col_covered_[c]) continue;
      if (best == -1 || col_remaining_[c] < col_remaining_[best]) {
        best = static_cast<long long>(c);
      }
    }
    if (best == -1) {
      solutions.push_back(chosen);
      return;
    }
    if (col_remaining_[static_cast<std::size_t>(best)] == 0) return;
    // Try each alive candidate row in ascending order.
    std::vector<long long> candidates;
    for (long long r : col_rows_[static_cast<std::size_t>(best)])
      if (row_alive_[static_cast<std::size_t>(r)]) candidates.push_back(r);
    std::sort(candidates.begin(), candidates.end());
    for (long long r : candidates) {
      if (max_solutions &&
          static_cast<long long>(solutions.size()) >= max_solutions)
        return;
      std::vector<std::pair<long long, int>> undo;  // (id, kind)
      if (place(r, undo)) {
        chosen[static_cast<std::size_t>(r)] = 1;
        search(chosen, solutions, max_solutions);
        chosen[static_cast<std::size_t>(r)] = 0;
      }
      rollback(undo);
    }
  }

 private:
  // kind 0: row r deactivated; kind 1: column c covered.
  bool place(long long row, std::vector<std::pair<long long, int>>& undo) {
    for (long long c : row_cols_[static_cast<std::size_t>(row)]) {
      if (col_covered_[static_cast<std::size_t>(c)]) return false;
    }
    for (long long c : row_cols_[static_cast<std::size_t>(row)]) {
      col_covered_[static_cast<std::size_t>(c)] = 1;
      undo.emplace_back(c, 1);
      for (long long r2 : col_rows_[static_cast<std::size_t>(c)]) {
        if (!row_alive_[static_cast<std::size_t>(r2)]) continue;
        row_alive_[static_cast<std::size_t>(r2)] = 0;
        undo.emplace_back(r2, 0);
        for (long long c2 : row_cols_[static_cast<std::size_t>(r2)])
          --col_remaining_[static_cast<std::size_t>(c2)];
      }
    }
    // Prune: an uncovered column with no remaining candidates is dead.
    for (long long c : row_cols_[static_cast<std::size_t>(row)])
      for (long long r2 : col_rows_[static_cast<std::size_t>(c)])
        for (long long c2 : row_cols_[static_cast<std::size_t>(r2)])
          if (!col_covered_[static_cast<std::size_t>(c2)] &&
              col_remaining_[static_cast<std::size_t>(c2)] == 0)
            return false;
    return true;
  }

  void rollback(const std::vector<std::pair<long long, int>>& undo) {
    for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
      if (it->second == 1) {
        col_covered_[static_cast<std::size_t>(it->first)] = 0;
      } else {
        row_alive_[static_cast<std::size_t>(it->first)] = 1;
        for (long long c2 : row_cols_[static_cast<std::size_t>(it->first)])
          ++col_remaining_[static_cast<std::size_t>(c2)];
      }
    }
  }

  std::vector<char> row_alive_;
  std::vector<std::vector<long long>> col_rows_;
  std::vector<std::vector<long long>> row_cols_;
  std::vector<long long> col_remaining_;
  std::vector<char> col_covered_;
};

}  // namespace

std::vector<PeriodicSet> solve_tilings(const TilingSystem& system,
                                       const PeriodLattice& lattice,
                                       const SolveOptions& opts) {
  if (system.tiles.empty())
    throw std::invalid_argument("solve_tilings: system has no tiles");
  for (const auto& t : system.tiles) {
    if (t.elements.empty())
      throw std::invalid_argument("solve_tilings: empty tile");
    if (t.group != system.group)
      throw std::invalid_argument("solve_tilings: tile group mismatch");
  }
  if (lattice.group != system.group)
    throw std::invalid_argument("solve_tilings: lattice group mismatch");

  Quotient q(system.group, lattice);
  const long long cells = q.size();
  const long long tiles = static_cast<long long>(system.tiles.size());
  if (cells * tiles > opts.cell_cap)
    throw std::length_error(
        "solve_tilings: universe " + std::to_string(cells) + " cells x " +
        std::to_string(tiles) + " tiles exceeds cap " +
        std::to_string(opts.cell_cap));

  ExactCover cover(cells, cells * tiles);
  for (long long r = 0; r < cells; ++r) {
    GroupElement a = q.representative(r);
    std::vector<long long> cols;
    for (long long m = 0; m < tiles; ++m) {
      for (const auto& f : system.tiles[static_cast<std::size_t>(m)].elements)
        cols.push_back(m * cells + q.index_of(add(a, f)));
    }
    cover.add_row(r, std::move(cols));
  }
  cover.finalize();

  std::vector<char> chosen(static_cast<std::size_t>(cells), 0);
  std::vector<std::vector<char>> raw;
  cover.search(chosen, raw, opts.max_solutions);
  std::sort(raw.begin(), raw.end());

  std::vector<PeriodicSet> out;
  out.reserve(raw.size());
  for (auto& memb : raw) {
    PeriodicSet s;
    s.lattice = lattice;
    s.membership = std::move(memb);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace forge
