#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "forge/bigint.hpp"

namespace forge {

/**
 * A finitely generated abelian group Z^r x Z/n_1 x ... x Z/n_k.
 *
 * The presentation is kept exactly as given (torsion orders are not
 * normalized or reordered); two specs are equal only field-by-field.
 * Every torsion order must be >= 1.
 */
struct GroupSpec {
  int free_rank = 0;
  std::vector<long long> torsion_orders;

  int rank() const {
    return free_rank + static_cast<int>(torsion_orders.size());
  }
  bool is_finite() const { return free_rank == 0; }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.free_rank == b.free_rank && a.torsion_orders == b.torsion_orders;
  }
  friend bool operator!=(const GroupSpec& a, const GroupSpec& b) {
    return !(a == b);
  }

  /** Validates ranks/orders; throws std::invalid_argument. */
  void validate() const;
  std::string to_string() const;
};

/**
 * Element of a GroupSpec: one integer per coordinate, with torsion
 * coordinates kept reduced into [0, n_i).  Plain value semantics.
 */
struct GroupElement {
  GroupSpec group;
  std::vector<long long> coords;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.group == b.group && a.coords == b.coords;
  }
  friend bool operator!=(const GroupElement& a, const GroupElement& b) {
    return !(a == b);
  }
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    return a.coords < b.coords;
  }
  std::string to_string() const;
};

/** Builds an element, reducing torsion coordinates; validates lengths. */
GroupElement make_element(const GroupSpec& g, std::vector<long long> coords);
GroupElement zero_element(const GroupSpec& g);
/** i-th standard generator (free coordinates first, then torsion). */
GroupElement standard_generator(const GroupSpec& g, int i);
/** Throws std::invalid_argument when the specs differ. */
GroupElement add(const GroupElement& a, const GroupElement& b);
GroupElement negate(const GroupElement& a);
GroupElement scale(long long k, const GroupElement& a);

/**
 * Subgroup of translations, given by a finite generator list.  An empty
 * list is the zero subgroup.
 */
struct PeriodLattice {
  GroupSpec group;
  std::vector<GroupElement> generators;

  void validate() const;
};

/** Axis-aligned window [lo, hi] per free coordinate (inclusive). */
struct Window {
  std::vector<std::array<long long, 2>> bounds;

  long long extent(int i) const { return bounds[i][1] - bounds[i][0] + 1; }
  long long cell_count() const;
};

/**
 * The quotient G / Lambda of a group by a finite-index period lattice.
 *
 * Internally computed via an integer column Hermite normal form of the
 * generator matrix (torsion relations appended), using exact
 * arbitrary-precision arithmetic.  Coset representatives are the unique
 * members of the box prod [0, h_ii); they are enumerated in lexicographic
 * (row-major) order and reduction of an arbitrary element to its
 * representative is deterministic.
 *
 * Throws std::domain_error("index not finite") when [G : Lambda] is
 * infinite.
 */
class Quotient {
 public:
  Quotient(GroupSpec group, const PeriodLattice& lattice);

  const GroupSpec& group() const { return group_; }
  long long size() const { return size_; }
  const std::vector<long long>& diagonal() const { return diag_; }

  /** Canonical representative of the coset of x. */
  GroupElement reduce(const GroupElement& x) const;
  /** Index of reduce(x) in the representative enumeration. */
  long long index_of(const GroupElement& x) const;
  /** Representative with the given enumeration index. */
  GroupElement representative(long long index) const;

 private:
  GroupSpec group_;
  std::vector<std::vector<Bigint>> cols_;  // lower-triangular HNF columns
  std::vector<long long> diag_;
  std::vector<long long> strides_;
  long long size_ = 0;
};

/** All coset representatives of G / Lambda in enumeration order. */
std::vector<GroupElement> enumerate_quotient(const GroupSpec& g,
                                             const PeriodLattice& lattice);

/**
 * Function samples over a window: free coordinates range over the window
 * box, torsion coordinates over their full cyclic range.  Values are
 * stored row-major with free coordinates outermost (in order), then
 * torsion coordinates.
 */
struct WindowFunc {
  GroupSpec group;
  Window window;
  std::vector<long long> values;

  long long value_at(const std::vector<long long>& coords) const;
  bool contains(const std::vector<long long>& coords) const;
};

/**
 * Detects translation periods of a sampled function.
 *
 * Candidate shift vectors have free coordinates bounded by max_index in
 * absolute value and arbitrary torsion coordinates.  A candidate v is
 * reported when f(x + v) = f(x) on the overlap of the window with its
 * shift; the precondition that each free extent is at least
 * 2 * max_index + 1 keeps every overlap at least half the window.
 * Each detected period is returned as the rank-one lattice it generates
 * (so the output is closed under negating generators); only vectors that
 * are not positive multiples of a previously reported one are kept, and
 * the representative of {v, -v} is the lexicographically positive one.
 *
 * Throws std::invalid_argument("window too small for requested
 * max_index") when the precondition fails.
 */
std::vector<PeriodLattice> detect_periods(const WindowFunc& f,
                                          long long max_index);

}  // namespace forge
