#ifndef FORGE_SUDOKU_HPP
#define FORGE_SUDOKU_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forge/bigint.hpp"

namespace forge {

/**
 * Board parameters for the 2-adic Sudoku system.  The digit base is
 * q = 2^{s0} with s0 >= 2, the board has N = q^2 columns indexed
 * 1..N, infinitely many rows, and cells take values in the nonzero
 * digits {1, .., q-1}.
 */
struct BoardParams {
  int s0 = 2;

  long long q() const { return 1LL << s0; }
  long long board_n() const { return q() * q(); }
};

/** Returns the last nonzero base-q digit of n; f_q(0) = 1 by convention. */
long long f_q(long long q, long long n);

/**
 * A finite horizontal band of the board: rows m_lo..m_hi over columns
 * 1..N, every value a nonzero digit.  rows[m - m_lo][n - 1] = F(n, m).
 */
struct SudokuWindow {
  BoardParams params;
  long long m_lo = 0;
  long long m_hi = -1;
  std::vector<std::vector<int>> rows;

  long long height() const { return m_hi - m_lo + 1; }
  bool contains_m(long long m) const { return m >= m_lo && m <= m_hi; }
  int at(long long n, long long m) const;
};

/** Builds a window by evaluating fill(n, m); validates the values. */
SudokuWindow make_window(const BoardParams& params, long long m_lo,
                         long long m_hi,
                         const std::function<int(long long, long long)>& fill);

/** Checks shape and digit range; throws std::invalid_argument on failure. */
void validate_window(const SudokuWindow& w);

/** A coset r + mZ of bad indices; modulus 0 encodes the empty coset. */
struct BadCoset {
  long long residue = 0;
  long long modulus = 0;

  bool empty() const { return modulus == 0; }
};

/** Sentinel for order -infinity (constant-off-nothing sequences). */
inline constexpr int kOrderBottom = -1;

/**
 * The statistics of a sequence g(n) = c f_q(a n + b): its order (the
 * 2-adic valuation of the step, or -infinity when the affine part never
 * vanishes), step a mod q, bad coset {n : a n + b = 0 mod q}, the affine
 * function alpha(n) = slope*n + intercept mod q agreeing with g off the
 * bad coset, and an explicit witness (a, b, c) with c an odd unit.
 */
struct LineStats {
  int order = kOrderBottom;
  long long step = 0;
  BadCoset bad_coset;
  long long slope = 0;
  long long intercept = 0;
  long long witness_a = 0;
  long long witness_b = 0;
  long long witness_c = 1;
};

/**
 * Decides membership of g (indexed by n = 1..N, values nonzero digits)
 * in the class of sequences c f_q(a n + b), returning the statistics and
 * a directly verifiable witness for members.  Requires |g| = N >= 8.
 */
std::optional<LineStats> analyze_sequence(const BoardParams& params,
                                          const std::vector<int>& g);

/** The line m = slope*n + intercept of the board. */
struct LineRef {
  long long intercept = 0;
  long long slope = 0;
};

struct SudokuReport {
  bool pass = false;
  long long lines_checked = 0;
  LineRef first_failure;
  std::string reason;
};

/**
 * Verifies that every line of slope |j| <= max_slope fully contained in
 * the window restricts to a sequence of the recognized class.  With
 * max_slope < 0 every slope with at least one fully contained line is
 * checked.  Throws std::invalid_argument if no line fits at all.
 */
SudokuReport is_sudoku_solution(const SudokuWindow& w, long long max_slope = -1);

/**
 * Attempts to explain each column by a permutation sigma_n of the digit
 * classes: F(n, m) = sigma_n(m mod q) whenever the right side is nonzero.
 * Returns all N permutations (as value tables indexed by residue) or
 * absent.  Requires height >= 2q.
 */
std::optional<std::vector<std::vector<int>>> has_good_columns(
    const SudokuWindow& w);

/** Exact fraction of window cells holding the given digit. */
Rational digit_density(const SudokuWindow& w, int digit);

/**
 * The function Psi(n, m) = a n + b m + c + d (q/4) m (m - n) mod q.
 * Restricted to any non-vertical line it is affine in n; only d mod 4
 * matters.
 */
struct PseudoAffine {
  long long modulus = 4;
  long long a = 0;
  long long b = 0;
  long long c = 0;
  long long d = 0;

  long long eval(long long n, long long m) const;
};

/**
 * Fits a pseudo-affine function to an 8x8 square of residues mod q:
 * square[v][u] holds the value at (n0 + u, m0 + v), each in [0, q).
 * Requires every row, diagonal and anti-diagonal segment of the square
 * to be affine mod q (throws std::invalid_argument naming the first
 * line that is not), and verifies the fit on all 64 cells
 * (std::runtime_error on mismatch, which can happen below q = 8).
 */
PseudoAffine fit_pseudo_affine(
    const std::vector<std::vector<long long>>& square, long long n0,
    long long m0, long long q);

/**
 * Coefficients (a', c') with {Psi = 0} = {(n, m) : m = a' n + c' mod q},
 * for Psi with odd vertical coefficient b.  The formula is verified by a
 * full scan over (Z/qZ)^2; std::runtime_error on mismatch (possible at
 * q = 4), std::invalid_argument when b is even.
 */
std::pair<long long, long long> zero_set_coeffs(const PseudoAffine& psi);

/**
 * The sheared window F'(n, m) = b F(n, m + a n + c) for odd b, restricted
 * to the rows where every column is available.  Throws
 * std::invalid_argument for even b or an empty result.
 */
SudokuWindow shear_window(const SudokuWindow& w, long long a, long long b,
                          long long c);

/** Shear parameters normalizing a window, and the resulting coefficient. */
struct NormalShear {
  long long a = 0;
  long long b = 1;
  long long c = 0;
  long long d = 0;
};

/**
 * Given a window agreeing with psi wherever psi is nonzero (checked;
 * std::invalid_argument with the witness cell otherwise) and psi with odd
 * vertical coefficient, finds a shear (a, b, c) such that the sheared
 * window satisfies F'(n, m) = m + d (q/4) m (m - n) mod q for all rows
 * m not divisible by q; the identity is verified exhaustively on the
 * sheared window.  std::runtime_error when no (b, d) works.
 */
NormalShear to_normal_form(const SudokuWindow& w, const PseudoAffine& psi);

/** Returns d if the window satisfies the normal-form identity, else absent. */
std::optional<long long> normal_form_d(const SudokuWindow& w);

/**
 * The vertical q-fold compression F_*(n, m) = F(n, q m).  Requires
 * height >= q (std::invalid_argument otherwise).
 */
SudokuWindow tetris(const SudokuWindow& w);

struct DescentStep {
  long long claimed_period = 0;
  long long height = 0;
  long long d = 0;
  long long shear_a = 0;
  long long shear_b = 1;
  long long shear_c = 0;
};

struct DescentReport {
  enum class Verdict { kRefuted, kWindowExhausted };
  Verdict verdict = Verdict::kWindowExhausted;
  std::string reason;
  std::vector<DescentStep> trace;

  bool refuted() const { return verdict == Verdict::kRefuted; }
};

/**
 * Descends a claimed vertical period M of a normal-form window: M must
 * be divisible by q, the compressed window must renormalize (directly or
 * through a fresh pseudo-affine fit), and the claim descends to M/q.
 * Terminates with the claim refuted or the window exhausted, never with
 * a confirmation.  Throws std::domain_error if the input window is not
 * in normal form.
 */
DescentReport descent_check(const SudokuWindow& w, long long claimed_period);

/**
 * Checks the rigidity implication for one instance: if the sequence
 * g(n) = c f_q(a n + b) agrees with alpha(n) = slope*n + intercept mod q
 * at every n of the 8-point interval {start, .., start+7} where alpha is
 * nonzero, then it so agrees at every n in 1..N where alpha is nonzero.
 * Returns the truth of that implication.
 */
bool check_rigid_out(const BoardParams& params, long long witness_a,
                     long long witness_b, long long witness_c,
                     long long alpha_slope, long long alpha_intercept,
                     long long start);

}  // namespace forge

#endif  // FORGE_SUDOKU_HPP
