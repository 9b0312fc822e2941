#pragma once

#include <string>
#include <vector>

#include "forge/sudoku.hpp"

namespace forge {

/**
 * One cell of a renderable grid: a digit value in [0, 16) and a shading
 * level.  Levels: 0 = unshaded, 1 = shaded (bad coset / zero class /
 * zero set), 2 = doubly shaded (second-order divisibility), 3 = origin
 * marker.
 */
struct RenderCell {
  int digit = 0;
  int level = 0;
};

/**
 * A rectangular grid of cells in row-major order, with optional row
 * labels (empty or one per row).
 */
struct RenderGrid {
  long long rows = 0;
  long long cols = 0;
  std::vector<RenderCell> cells;
  std::vector<std::string> row_labels;

  RenderCell& at(long long r, long long c);
  const RenderCell& at(long long r, long long c) const;
};

/**
 * ASCII rendering: one two-character token per cell -- a shading mark
 * ('.', '#', '%', '@' for levels 0..3) followed by the digit as an
 * uppercase hexadecimal character -- tokens separated by single spaces.
 * When labels are present each row is prefixed by its right-aligned
 * label and " | ".  Digits outside [0, 16) raise std::invalid_argument.
 */
std::string to_ascii(const RenderGrid& grid);

/**
 * P2 (plain text) grayscale PGM rendering.  Each cell becomes a
 * scale x scale block: background gray encodes the shading level
 * (255 / 180 / 110 / 230 for levels 0..3), the digit is drawn as a 3x5
 * glyph in black, and one-pixel grid lines separate the cells.
 * Requires scale >= 8.
 */
std::string to_pgm(const RenderGrid& grid, int scale = 12);

/**
 * The digit strip of f_q over n in [n_lo, n_hi] as a single-row grid.
 * Shading encodes the q-adic class of the index: level 0 for n coprime
 * to q, 1 for n in qZ \ q^2 Z, 2 for deeper divisibility, 3 at n = 0.
 */
RenderGrid render_fq_strip(long long q, long long n_lo, long long n_hi);

/**
 * A length-N digit sequence of the recognized class as a single-row
 * grid with its bad coset shaded.  Throws std::invalid_argument when
 * the sequence is not recognized.
 */
RenderGrid render_sequence(const BoardParams& params,
                           const std::vector<int>& digits);

/**
 * A board window with rows m_hi down to m_lo top-to-bottom and columns
 * n = 1..N, labelled by m.  When the window has good columns, the zero
 * class of each column permutation is shaded (the cells where the
 * permutation does not pin the digit); otherwise no cell is shaded.
 */
RenderGrid render_window(const SudokuWindow& w);

/**
 * Values of a pseudo-affine function on [n_lo, n_hi] x [m_lo, m_hi]
 * (m decreasing top-to-bottom, rows labelled by m), with the zero set
 * shaded.
 */
RenderGrid render_pseudo_affine(const PseudoAffine& psi, long long n_lo,
                                long long n_hi, long long m_lo,
                                long long m_hi);

}  // namespace forge
