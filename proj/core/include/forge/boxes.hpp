#pragma once

#include <array>
#include <vector>

#include "forge/bigint.hpp"

namespace forge {

/**
 * An axis-aligned box with exact rational, half-open bounds [lo, hi) per
 * axis, carrying a sign.  A region is a list of signed boxes and denotes
 * the pointwise sum of their signed indicators.  pair_id links a removed
 * corner cube with its re-attached translate; -1 means unpaired.
 */
struct SignedBox {
  std::vector<std::array<Rational, 2>> bounds;
  int sign = 1;
  long long pair_id = -1;
};

struct BoxRegion {
  int dimension = 0;
  std::vector<SignedBox> boxes;
};

/**
 * The notched unit cube in dimension d: start from [0,1)^d, remove for
 * each axis k the corner cube
 *   C_k = prod_{j<k} [x_j, x_j+eps) x [0, eps) x prod_{j>k} [x_j, x_j+eps)
 * (the [0, eps) factor sitting in axis k) and re-attach its translate
 * C_k + e_k.  The result still tiles R^d under integer translations, but
 * the staggered notches rule out any non-integer translation tiling.
 *
 * Parameters must satisfy 0 < eps < 1/5 and 2*eps < x_j < 1 - 3*eps for
 * every axis; violations raise std::invalid_argument naming the broken
 * inequality (e.g. "eps < 1/5 violated").
 */
BoxRegion build_rigid_tile_boxes(int dimension, const Rational& eps,
                       const std::vector<Rational>& corners);

/** Signed volume of a region (sum of sign * product of edge lengths). */
Rational region_volume(const BoxRegion& region);

/** Translates every box of the region by the given rational vector. */
BoxRegion translate_region(const BoxRegion& region,
                           const std::vector<Rational>& shift);

/**
 * Disjoint union of integer translates of a base region: the lift
 * Sigma = F + R of a finite point set F.  The translates must not
 * overlap anywhere (net indicator must stay <= 1); an overlap raises
 * std::runtime_error.
 */
BoxRegion lift_discrete_tile(const BoxRegion& base,
                      const std::vector<std::vector<long long>>& points);

/** Net signed indicator of a box list at a single point (exact). */
long long indicator_at(const std::vector<SignedBox>& boxes,
                       const std::vector<Rational>& point);

/**
 * Aggregate result of sweeping the net indicator over a window.  The
 * sweep compresses all box and window endpoints per axis (comparisons are
 * exact, equivalent to clearing denominators) and accumulates signs in a
 * d-dimensional difference array, so each compressed cell is uniform.
 * `witness` holds the corner of some violating cell when not exact.
 */
struct SweepReport {
  bool exact = true;
  long long cells_checked = 0;
  long long cells_zero = 0;
  long long cells_one = 0;
  long long cells_multiple = 0;
  long long cells_negative = 0;
  std::vector<Rational> witness;
};

/**
 * Sweeps the net indicator of `boxes` over the half-open window
 * prod [window[i][0], window[i][1]) and reports whether it is exactly 1
 * everywhere.  Throws std::invalid_argument for malformed windows and
 * std::length_error if the compressed grid exceeds 2^24 cells.
 */
SweepReport sweep_indicator(const std::vector<SignedBox>& boxes,
                            const std::vector<std::array<Rational, 2>>& window);

/**
 * Verifies that the lattice translates of `region` cover the window
 * exactly once.  `basis` lists the lattice generators as rational column
 * vectors; an empty basis means the integer lattice Z^d.  A non-trivial
 * basis is inverted exactly (via the adjugate) to bound the needed
 * coefficients, which is supported for d <= 3.
 */
SweepReport verify_box_lattice_tiling(
    const BoxRegion& region, const std::vector<std::vector<Rational>>& basis,
    const std::vector<std::array<Rational, 2>>& window);

}  // namespace forge
