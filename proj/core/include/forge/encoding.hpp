#ifndef FORGE_ENCODING_HPP
#define FORGE_ENCODING_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forge/functional.hpp"
#include "forge/group.hpp"
#include "forge/sudoku.hpp"
#include "forge/tiling.hpp"

namespace forge {

/**
 * Little-endian binary value of a bit vector: bits[0] + 2 bits[1] + ...
 * Each entry must be 0 or 1 and the width must be in [1, 16]; throws
 * std::invalid_argument otherwise.  Together with binary_decode this is
 * the standard bijection {0,1}^{s0} <-> Z / 2^{s0} Z.
 */
long long binary_encode(const std::vector<int>& bits);

/** Inverse of binary_encode; value must lie in [0, 2^{s0}). */
std::vector<int> binary_decode(long long value, int s0);

/**
 * A finite rectangle of the boolean line encoding of a board window.
 *
 * For a board with digit base q = 2^{s0} and N = q^2 columns, the full
 * encoding consists of 2 s0 N boolean functions beta_{a,b,n} on Z^2,
 * indexed by a in {0,1} (column side / board side), bit position
 * b in {0..s0-1} and column n in {1..N}.  The point (i, j) addresses the
 * line m = j n + i of the board; the board side packs the line's digits,
 *
 *     binary( beta_{1,0,n}(i,j), ..., beta_{1,s0-1,n}(i,j) ) = F(n, jn+i),
 *
 * while the column side packs the column permutation's digit at the
 * line's residue,
 *
 *     binary( beta_{0,0,n}(i,j), ..., beta_{0,s0-1,n}(i,j) )
 *         = sigma_n( (jn+i) mod q ).
 *
 * This type stores the restriction of all 2 s0 N functions to one finite
 * rectangle i_lo <= i <= i_hi, j_lo <= j <= j_hi (both inclusive).
 */
struct BetaTuple {
  BoardParams params;
  long long i_lo = 0;
  long long i_hi = -1;
  long long j_lo = 0;
  long long j_hi = -1;
  /**
   * Bit storage, one byte per bit.  Layout: function-major, cell-minor;
   * function index (a*s0 + b)*N + (n-1), cell index
   * (j - j_lo)*i_extent + (i - i_lo).
   */
  std::vector<unsigned char> bits;

  long long i_extent() const { return i_hi - i_lo + 1; }
  long long j_extent() const { return j_hi - j_lo + 1; }
  long long cells() const { return i_extent() * j_extent(); }
  long long function_count() const {
    return 2LL * params.s0 * params.board_n();
  }
  bool in_window(long long i, long long j) const {
    return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
  }

  /** Single bit beta_{a,b,n}(i,j); arguments checked. */
  int bit(int a, int b, long long n, long long i, long long j) const;
  void set_bit(int a, int b, long long n, long long i, long long j, int value);
  /** Packed digit binary(beta_{a,0,n}(i,j), ..., beta_{a,s0-1,n}(i,j)). */
  long long digit(int a, long long n, long long i, long long j) const;
  void set_digit(int a, long long n, long long i, long long j,
                 long long value);
};

/** All-zero tuple on the given rectangle; validates shape. */
BetaTuple make_beta_tuple(const BoardParams& params, long long i_lo,
                          long long i_hi, long long j_lo, long long j_hi);

/**
 * Encodes a board window together with its column permutations.
 *
 * sigmas[n-1] is a value table over residues 0..q-1, as produced by
 * has_good_columns: a permutation of Z/qZ with F(n, m) =
 * sigmas[n-1][m mod q] wherever the right side is nonzero.  The relation
 * is re-validated; a violation throws std::invalid_argument
 * ("good-columns precondition unmet ...").
 *
 * The rectangle is determined by the window and the slope cap:
 * j in [-slope_cap, slope_cap] and i in
 * [m_lo + slope_cap*N, m_hi - slope_cap*N], so that every encoded line
 * m = j n + i stays inside the window for n in 1..N.  The i range must
 * be nonempty and at least q cells wide (so the permutation axiom is
 * checkable); otherwise std::invalid_argument ("window too short for
 * slope cap").
 */
BetaTuple encode_solution(const SudokuWindow& w,
                          const std::vector<std::vector<int>>& sigmas,
                          long long slope_cap);

struct AxiomCheck {
  bool ok = true;
  std::string witness;  // first violation, empty when ok
};

/**
 * The four line-encoding axioms.
 *
 *   I.   For every (i,j) in the rectangle, the digit sequence
 *        n -> binary(beta_{1,.,n}(i,j)) is a recognized line class
 *        member (nonzero digits forming a sequence c f_q(a n + b)).
 *   II.  Wherever the column-side digit is nonzero it equals the
 *        board-side digit (equivalently, bitwise equality).
 *   III. Each beta_{a,b,n} is invariant under the shift (-n, 1):
 *        beta(i, j) = beta(i - n, j + 1) whenever both cells lie in the
 *        rectangle (two representations of one line agree).
 *   IV.  For each n and j, every q consecutive column-side digits
 *        binary(beta_{0,.,n}(i..i+q-1, j)) enumerate all of Z/qZ (the
 *        packed tuple is a periodized permutation of the digit classes
 *        in the direction (1,0)).
 */
struct AxiomReport {
  AxiomCheck i, ii, iii, iv;

  bool all_ok() const { return i.ok && ii.ok && iii.ok && iv.ok; }
};

/**
 * Full check of axioms I-IV with one witness per failing axiom.
 * Axiom IV needs at least q columns in the i range (throws
 * std::invalid_argument otherwise).
 */
AxiomReport check_axioms(const BetaTuple& beta);

/**
 * Cheapest-first violation scan (order III, IV, II, I); returns the
 * axiom label and witness of the first violation found, or nullopt when
 * all axioms hold.  Same precondition as check_axioms.
 */
std::optional<std::string> first_axiom_violation(const BetaTuple& beta);

/**
 * Margin convention for finite rectangles: a board-side bit at (i,j) is
 * "pinned" when at least one of its transport partners (i-n, j+1),
 * (i+n, j-1) lies in the rectangle, so a single-bit change is always
 * visible to axiom III.  Column-side bits are always pinned through
 * axiom IV (any i belongs to a full q-run when the range allows one).
 * On the extreme rows, board-side cells in the end zones of width n
 * have both partners outside; such bits are constrained only by axioms
 * I and II and a flip there may escape all four axioms.
 */
bool mutation_pinned(const BetaTuple& beta, int a, long long n, long long i,
                     long long j);

struct DecodedSolution {
  SudokuWindow window;                   // rows i_lo..i_hi of the board
  std::vector<std::vector<int>> sigmas;  // value table per column
};

/**
 * Reconstructs the board window and column permutations from the j = 0
 * row of the tuple: F(n, m) = binary(beta_{1,.,n}(m, 0)) and
 * sigma_n(rho) = binary(beta_{0,.,n}(i, 0)) for i in the first q-run.
 *
 * The axioms are re-checked first; a failure throws std::runtime_error
 * citing the axiom ("axiom I", ...).  Requires j = 0 in the rectangle
 * and an i range of at least 2q cells (so the reconstruction supports
 * the column test); the reconstructed window is then verified with
 * is_sudoku_solution and has_good_columns and a violation throws
 * std::runtime_error — on every tuple produced by encode_solution these
 * verifications succeed.
 */
DecodedSolution decode_beta(const BetaTuple& beta);

/**
 * Index of the variable pair (a, b, n) in a flattened word over the
 * index set {0,1} x {0..s0-1} x {1..N}: (a*s0 + b)*N + (n-1).
 */
long long omega_index(const BoardParams& params, int a, int b, long long n);

/** The word (beta_{a,b,n}(i,j))_{(a,b,n)} at one cell of the rectangle. */
std::vector<int> omega_word_at(const BetaTuple& beta, long long i,
                               long long j);

/**
 * The admissible-word predicate behind the encoding: a word
 * w in {0,1}^{2 s0 N} belongs when
 *   (i)  the board-side digit sequence n -> binary(w[1,.,n]) has nonzero
 *        digits and is a recognized line class member, and
 *   (ii) every nonzero column-side digit equals the board-side digit.
 * Membership at every cell of a tuple is exactly axioms I and II.
 */
bool omega_contains(const BoardParams& params, const std::vector<int>& word);

/**
 * Reflected variant over {0,1}^{1 + 2 s0 N}: the extra leading bit star
 * selects the reflection R_star(x) = star + (-1)^star x applied to every
 * letter before the membership test.  Symmetric under the global flip
 * (star, w) -> (1-star, 1-w).
 */
bool omega_tilde_contains(const BoardParams& params, int star,
                          const std::vector<int>& word);

/**
 * Shape report for the one-property packaging of the whole encoding as
 * a functional-equation property over G = Z^2 x (Z/2Z)^3.
 *
 * The visible tuple is (alpha_*, alpha_{a,b,n}) with values in Z/2^M;
 * the property is the conjunction of
 *   (a) the symmetric boolean constraint with predicate
 *       omega_tilde_contains over all 1 + 2 s0 N components,
 *   (b) invariance of each alpha_{a,b,n} under ((-n,1),(0,0,0)), and
 *   (c) for each n, the column-side s0-tuple being a boolean periodized
 *       permutation in the direction ((1,0),(0,0,0)).
 */
struct PropertySReport {
  GroupSpec group;                 // Z^2 x (Z/2Z)^3
  long long component_count = 0;   // 1 + 2 s0 N visible functions
  int m_exponent = 0;              // minimal M with 2^M > 2*count + 4
  long long omega_arity = 0;       // 2 s0 N
  long long periodicity_conjuncts = 0;  // one per (a,b,n)
  long long permutation_conjuncts = 0;  // one per n
  /** Compiled wrapper; only present in toy mode. */
  std::optional<ExistentialWrapper> wrapper;
  /** Compiled tiling system; only present when requested and feasible. */
  std::optional<TilingSystem> tiling;
};

/**
 * Assembles the property.
 *
 * With toy = false the report is symbolic: counts and the group, no
 * compiled artifact (the predicate alone ranges over 2^{2 s0 N} words).
 *
 * With toy = true the index set is cut down to one bit position and
 * columns 1..toy_columns (so the visible tuple has 1 + 2*toy_columns
 * components, which must be at most 8), and the conjunction is compiled
 * to an existential wrapper.  toy_omega, when given, replaces the
 * admissible-word predicate on the reduced words of length
 * 2*toy_columns (it must be reflection-symmetric after the tilde
 * extension, which holds for every predicate); absent it accepts every
 * word.  With compile_tiling = true the wrapper is further compiled to
 * tiling equations; the auxiliary components make the product codomain
 * exceed the 2^20 cell cap already at the smallest toy sizes, and the
 * overflow is reported by rethrowing the compiler's std::length_error
 * with the offending component count and bit total attached.
 */
PropertySReport assemble_property_S(
    const BoardParams& params, bool toy, long long toy_columns = 3,
    const std::function<bool(const std::vector<int>&)>& toy_omega = {},
    bool compile_tiling = false);

}  // namespace forge

#endif  // FORGE_ENCODING_HPP
