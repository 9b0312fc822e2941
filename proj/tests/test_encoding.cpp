#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "forge/encoding.hpp"
#include "forge/functional.hpp"
#include "forge/group.hpp"
#include "forge/sudoku.hpp"

using namespace forge;
using doctest::Contains;

namespace {

// Deterministic 64-bit mix stream for randomized trials.
struct Mix64 {
  std::uint64_t state;
  explicit Mix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  long long below(long long n) {
    return static_cast<long long>(next() % static_cast<std::uint64_t>(n));
  }
};

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

SudokuWindow standard_window(const BoardParams& params, long long m_lo,
                             long long m_hi) {
  const long long q = params.q();
  return make_window(params, m_lo, m_hi, [q](long long, long long m) {
    return static_cast<int>(f_q(q, m));
  });
}

// A member of the affine symmetry family c f_q(alpha m + beta n + gamma)
// (alpha, c odd).  Every line restricts to a recognized sequence and each
// column n is explained by the permutation rho -> c (alpha rho + beta n +
// gamma) mod q, whose zero class moves with n when beta is not divisible
// by q.
SudokuWindow affine_window(const BoardParams& params, long long alpha,
                           long long beta, long long gamma, long long c,
                           long long m_lo, long long m_hi) {
  const long long q = params.q();
  return make_window(params, m_lo, m_hi, [=](long long n, long long m) {
    return static_cast<int>(
        mod_pos(c * f_q(q, alpha * m + beta * n + gamma), q));
  });
}

bool windows_equal(const SudokuWindow& a, const SudokuWindow& b,
                   long long m_lo, long long m_hi) {
  for (long long m = m_lo; m <= m_hi; ++m) {
    for (long long n = 1; n <= a.params.board_n(); ++n) {
      if (a.at(n, m) != b.at(n, m)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("binary packing of digits") {
  // Little-endian: (1,0) -> 1 and (1,1) -> 1 + 2 = 3.
  CHECK(binary_encode({1, 0}) == 1);
  CHECK(binary_encode({1, 1}) == 3);
  CHECK(binary_encode({0, 1}) == 2);
  CHECK(binary_encode({0, 0, 0, 1}) == 8);

  for (int s0 = 1; s0 <= 4; ++s0) {
    for (long long v = 0; v < (1LL << s0); ++v) {
      CHECK(binary_encode(binary_decode(v, s0)) == v);
    }
  }
  // Width-respecting inverse: decode pads with zero bits.
  CHECK(binary_decode(1, 3) == std::vector<int>{1, 0, 0});

  CHECK_THROWS_AS(binary_encode({}), std::invalid_argument);
  CHECK_THROWS_AS(binary_encode({2}), std::invalid_argument);
  CHECK_THROWS_AS(binary_decode(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(binary_decode(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(binary_decode(0, 0), std::invalid_argument);
}

TEST_CASE("beta tuples store one bit per function and cell") {
  const BoardParams params;
  BetaTuple beta = make_beta_tuple(params, -5, 6, -1, 1);
  CHECK(beta.i_extent() == 12);
  CHECK(beta.j_extent() == 3);
  CHECK(beta.cells() == 36);
  CHECK(beta.function_count() == 64);
  CHECK(static_cast<long long>(beta.bits.size()) == 64 * 36);

  CHECK(beta.bit(0, 0, 1, -5, -1) == 0);
  beta.set_bit(1, 1, 16, 6, 1, 1);
  CHECK(beta.bit(1, 1, 16, 6, 1) == 1);
  CHECK(beta.digit(1, 16, 6, 1) == 2);
  beta.set_digit(0, 3, 0, 0, 3);
  CHECK(beta.bit(0, 0, 3, 0, 0) == 1);
  CHECK(beta.bit(0, 1, 3, 0, 0) == 1);

  CHECK_THROWS_AS(beta.bit(2, 0, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(beta.bit(0, 2, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(beta.bit(0, 0, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(beta.bit(0, 0, 17, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(beta.bit(0, 0, 1, 7, 0), std::invalid_argument);
  CHECK_THROWS_AS(beta.bit(0, 0, 1, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(beta.set_digit(0, 1, 0, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_beta_tuple(params, 3, 2, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_beta_tuple(BoardParams{1}, 0, 5, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("encoding the standard solution") {
  const BoardParams params;
  const long long q = params.q();
  SudokuWindow w = standard_window(params, -300, 300);
  auto sigmas = has_good_columns(w);
  REQUIRE(sigmas.has_value());

  BetaTuple beta = encode_solution(w, *sigmas, 3);
  CHECK(beta.i_lo == -300 + 3 * 16);
  CHECK(beta.i_hi == 300 - 3 * 16);
  CHECK(beta.j_lo == -3);
  CHECK(beta.j_hi == 3);

  // Hand-derived bits.  Line (i=1, j=0) is the constant row m = 1 with
  // digit f_4(1) = 1 = binary(1, 0); line (i=2, j=0) packs f_4(2) = 2 =
  // binary(0, 1).
  CHECK(beta.bit(1, 0, 5, 1, 0) == 1);
  CHECK(beta.bit(1, 1, 5, 1, 0) == 0);
  CHECK(beta.bit(1, 0, 7, 2, 0) == 0);
  CHECK(beta.bit(1, 1, 7, 2, 0) == 1);
  // The standard permutations are the identity on the digit classes:
  // sigma_n(2) = 2 and sigma_n(0) = 0.
  CHECK(beta.digit(0, 3, 2, 0) == 2);
  CHECK(beta.digit(0, 3, 4, 0) == 0);
  // Diagonal line (i=0, j=1) at n=4 passes through m = 4, and f_4(4) =
  // f_4(1) = 1.
  CHECK(beta.digit(1, 4, 0, 1) == 1);

  AxiomReport report = check_axioms(beta);
  CHECK(report.all_ok());
  CHECK(report.i.witness.empty());
  CHECK(!first_axiom_violation(beta).has_value());

  // Point-line duality: (i, j) and (i + (j - j') n, j') address the same
  // board cell at column n, so the encoded bits agree.
  CHECK(beta.digit(1, 5, 7, 1) == beta.digit(1, 5, 12, 0));
  CHECK(beta.digit(1, 16, -20, 2) == beta.digit(1, 16, 12, 0));
  CHECK(beta.digit(0, 9, -3, -1) == beta.digit(0, 9, -12, 0));

  DecodedSolution dec = decode_beta(beta);
  CHECK(dec.window.m_lo == beta.i_lo);
  CHECK(dec.window.m_hi == beta.i_hi);
  CHECK(windows_equal(dec.window, w, beta.i_lo, beta.i_hi));
  CHECK(dec.sigmas == *sigmas);

  // The encode window must leave room for the slope cap and at least q
  // columns of i values.
  CHECK_THROWS_WITH_AS(encode_solution(w, *sigmas, 19),
                       Contains("window too short"), std::invalid_argument);
  CHECK_THROWS_AS(encode_solution(w, *sigmas, -1), std::invalid_argument);

  // The good-columns relation is revalidated.
  auto bad = *sigmas;
  bad[2][1] = 3;
  bad[2][3] = 1;
  CHECK_THROWS_WITH_AS(encode_solution(w, bad, 1),
                       Contains("good-columns precondition unmet"),
                       std::invalid_argument);
  auto not_perm = *sigmas;
  not_perm[0][1] = 2;
  CHECK_THROWS_WITH_AS(encode_solution(w, not_perm, 1),
                       Contains("not a permutation"), std::invalid_argument);
  auto short_sig = *sigmas;
  short_sig.pop_back();
  CHECK_THROWS_AS(encode_solution(w, short_sig, 1), std::invalid_argument);
  (void)q;
}

TEST_CASE("round trips over randomized good-columns windows") {
  const BoardParams params;
  Mix64 rng(20260822);
  for (int trial = 0; trial < 20; ++trial) {
    const long long alpha = 2 * rng.below(8) + 1;
    const long long beta_c = rng.below(7) - 3;
    const long long gamma = rng.below(40) - 20;
    const long long c = rng.below(2) == 0 ? 1 : 3;
    const long long m_lo = -150 - rng.below(50);
    const long long m_hi = 150 + rng.below(50);
    const long long cap = 1 + rng.below(3);
    SudokuWindow w = affine_window(params, alpha, beta_c, gamma, c, m_lo,
                                   m_hi);
    auto sigmas = has_good_columns(w);
    REQUIRE(sigmas.has_value());

    BetaTuple tuple = encode_solution(w, *sigmas, cap);
    CHECK(check_axioms(tuple).all_ok());
    DecodedSolution dec = decode_beta(tuple);
    CHECK(windows_equal(dec.window, w, tuple.i_lo, tuple.i_hi));
    CHECK(dec.sigmas == *sigmas);

    // Idempotence: encoding the decoded solution reproduces the tuple on
    // the shrunken rectangle.
    BetaTuple again = encode_solution(dec.window, dec.sigmas, 0);
    for (long long i = again.i_lo; i <= again.i_hi; i += 7) {
      for (long long n = 1; n <= params.board_n(); n += 3) {
        CHECK(again.digit(1, n, i, 0) == tuple.digit(1, n, i, 0));
        CHECK(again.digit(0, n, i, 0) == tuple.digit(0, n, i, 0));
      }
    }
  }
}

TEST_CASE("pinned single-bit mutations always break an axiom") {
  const BoardParams params;
  SudokuWindow w = standard_window(params, -40, 40);
  auto sigmas = has_good_columns(w);
  REQUIRE(sigmas.has_value());
  BetaTuple base = encode_solution(w, *sigmas, 1);
  CHECK(base.i_lo == -24);
  CHECK(base.i_hi == 24);

  long long pinned = 0, unpinned = 0, broken = 0;
  std::map<std::string, long long> by_axiom;
  long long escapes = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < params.s0; ++b) {
      for (long long n = 1; n <= params.board_n(); ++n) {
        for (long long j = base.j_lo; j <= base.j_hi; ++j) {
          for (long long i = base.i_lo; i <= base.i_hi; ++i) {
            BetaTuple mut = base;
            mut.set_bit(a, b, n, i, j, 1 - mut.bit(a, b, n, i, j));
            auto verdict = first_axiom_violation(mut);
            if (!mutation_pinned(base, a, n, i, j)) {
              ++unpinned;
              if (!verdict) ++escapes;
              continue;
            }
            ++pinned;
            if (verdict) {
              ++broken;
              ++by_axiom[verdict->substr(0, verdict->find(':'))];
            }
          }
        }
      }
    }
  }
  // Every pinned flip is visible to an axiom: board-side flips with a
  // transport partner in the rectangle break III, and column-side flips
  // on the extreme rows' end zones (no partner) still break IV because a
  // full q-run stops enumerating the digit classes.
  CHECK(pinned == 8864);
  CHECK(broken == pinned);
  CHECK(by_axiom["axiom III"] == 8320);
  CHECK(by_axiom["axiom IV"] == 544);
  // The margin convention earns its keep: among the 544 unpinned
  // board-side bits (extreme-row end zones), a few flips keep every
  // axiom satisfied — the flipped line stays in the recognized class and
  // its zero column digit makes the agreement axiom vacuous there.
  CHECK(unpinned == 544);
  CHECK(escapes == 18);
}

TEST_CASE("axiom failures isolate and report their axiom") {
  const BoardParams params;
  const long long q = params.q();
  const long long big_n = params.board_n();

  SudokuWindow w = standard_window(params, 0, 40);
  auto sigmas = has_good_columns(w);
  REQUIRE(sigmas.has_value());
  BetaTuple base = encode_solution(w, *sigmas, 0);  // single row j = 0

  SUBCASE("axiom I alone: an unrecognized line on a zero-class column") {
    // Column i = 8 is a zero class cell of every row permutation, so the
    // agreement axiom is vacuous there, the single-row rectangle has no
    // transport pairs, and the column side is untouched; replacing the
    // board side with (1,3,1,1,...,1) (not of the form c f_q(a n + b))
    // breaks exactly the line-class axiom.
    BetaTuple t = base;
    for (long long n = 1; n <= big_n; ++n) {
      t.set_digit(1, n, 8, 0, n == 2 ? 3 : 1);
    }
    AxiomReport r = check_axioms(t);
    CHECK(!r.i.ok);
    CHECK(r.ii.ok);
    CHECK(r.iii.ok);
    CHECK(r.iv.ok);
    CHECK_MESSAGE(r.i.witness == "(i=8, j=0): line sequence is not in the "
                                 "recognized class",
                  r.i.witness);
    auto first = first_axiom_violation(t);
    REQUIRE(first.has_value());
    CHECK_MESSAGE(first->find("axiom I:") == 0, *first);
    CHECK_THROWS_WITH_AS(decode_beta(t), Contains("axiom I"),
                         std::runtime_error);
  }

  SUBCASE("axiom II alone: a recognized line that contradicts sigma") {
    // Row m = 1 is constant 1; constant 2 is also recognized but
    // disagrees with sigma_n(1) = 1.
    BetaTuple t = base;
    for (long long n = 1; n <= big_n; ++n) t.set_digit(1, n, 1, 0, 2);
    AxiomReport r = check_axioms(t);
    CHECK(r.i.ok);
    CHECK(!r.ii.ok);
    CHECK(r.iii.ok);
    CHECK(r.iv.ok);
    CHECK_MESSAGE(r.ii.witness == "(i=1, j=0, n=1): column digit 1 "
                                  "disagrees with board digit 2",
                  r.ii.witness);
    CHECK_THROWS_WITH_AS(decode_beta(t), Contains("axiom II"),
                         std::runtime_error);
  }

  SUBCASE("axiom IV alone: a column side that stops enumerating") {
    // Zeroing the column side of one n keeps the agreement axiom vacuous
    // but no q-run enumerates the classes any more.
    BetaTuple t = base;
    for (long long i = t.i_lo; i <= t.i_hi; ++i) t.set_digit(0, 5, i, 0, 0);
    AxiomReport r = check_axioms(t);
    CHECK(r.i.ok);
    CHECK(r.ii.ok);
    CHECK(r.iii.ok);
    CHECK(!r.iv.ok);
    CHECK_MESSAGE(r.iv.witness == "(n=5, j=0): column-side digits on i in "
                                  "[0, 3] repeat 0",
                  r.iv.witness);
    CHECK_THROWS_WITH_AS(decode_beta(t), Contains("axiom IV"),
                         std::runtime_error);
  }

  SUBCASE("axiom III alone: rows that are each fine but do not transport") {
    // Copy the j = 0 row into the j = +-1 rows: every row is a valid
    // single-row encoding (lines recognized, digits agree, runs
    // enumerate) but the transport relation between rows fails.
    SudokuWindow w2 = standard_window(params, -60, 60);
    auto sig2 = has_good_columns(w2);
    REQUIRE(sig2.has_value());
    BetaTuple two = encode_solution(w2, *sig2, 1);
    BetaTuple t = two;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < params.s0; ++b) {
        for (long long n = 1; n <= big_n; ++n) {
          for (long long i = t.i_lo; i <= t.i_hi; ++i) {
            t.set_bit(a, b, n, i, 1, two.bit(a, b, n, i, 0));
            t.set_bit(a, b, n, i, -1, two.bit(a, b, n, i, 0));
          }
        }
      }
    }
    AxiomReport r = check_axioms(t);
    CHECK(r.i.ok);
    CHECK(r.ii.ok);
    CHECK(!r.iii.ok);
    CHECK(r.iv.ok);
    CHECK_MESSAGE(r.iii.witness == "beta(a=0, b=0, n=1) differs between "
                                   "(i=-43, j=-1) and (i=-44, j=0)",
                  r.iii.witness);
    CHECK_THROWS_WITH_AS(decode_beta(t), Contains("axiom III"),
                         std::runtime_error);
  }

  SUBCASE("the all-zero tuple fails the line-class axiom on zero digits") {
    BetaTuple zero = make_beta_tuple(params, 0, 2 * q, 0, 0);
    AxiomReport r = check_axioms(zero);
    CHECK(!r.i.ok);
    CHECK_MESSAGE(r.i.witness == "(i=0, j=0): zero digit at n=1",
                  r.i.witness);
    CHECK(!r.iv.ok);  // constant zero digits never enumerate the classes
  }

  SUBCASE("rectangles narrower than q are not checkable") {
    BetaTuple thin = make_beta_tuple(params, 0, 2, 0, 0);
    CHECK_THROWS_WITH_AS(check_axioms(thin), Contains("at least q columns"),
                         std::invalid_argument);
    CHECK_THROWS_AS(first_axiom_violation(thin), std::invalid_argument);
  }
}

TEST_CASE("decode preconditions") {
  const BoardParams params;
  SudokuWindow w = standard_window(params, 0, 40);
  auto sigmas = has_good_columns(w);
  REQUIRE(sigmas.has_value());
  BetaTuple base = encode_solution(w, *sigmas, 0);

  // Shift the rectangle label so the j = 0 row is missing.
  BetaTuple shifted = base;
  shifted.j_lo = 1;
  shifted.j_hi = 1;
  CHECK_THROWS_WITH_AS(decode_beta(shifted), Contains("j = 0"),
                       std::invalid_argument);

  // A rectangle of width below 2q cannot support the column test.
  SudokuWindow small = standard_window(params, 0, 6);
  auto ssig = has_good_columns(standard_window(params, 0, 40));
  REQUIRE(ssig.has_value());
  BetaTuple narrow = encode_solution(small, *ssig, 0);
  CHECK(narrow.i_extent() == 7);
  CHECK_THROWS_WITH_AS(decode_beta(narrow), Contains("at least 2q"),
                       std::invalid_argument);
}

TEST_CASE("admissible words and their reflected variant") {
  const BoardParams params;
  const long long arity = 2 * params.s0 * params.board_n();
  CHECK(arity == 64);

  // Index layout: column side first, then board side, n fastest.
  CHECK(omega_index(params, 0, 0, 1) == 0);
  CHECK(omega_index(params, 0, 0, 16) == 15);
  CHECK(omega_index(params, 0, 1, 1) == 16);
  CHECK(omega_index(params, 1, 0, 1) == 32);
  CHECK(omega_index(params, 1, 1, 16) == 63);
  CHECK_THROWS_AS(omega_index(params, 2, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(omega_index(params, 0, 0, 0), std::invalid_argument);

  SudokuWindow w = standard_window(params, -80, 80);
  auto sigmas = has_good_columns(w);
  REQUIRE(sigmas.has_value());
  BetaTuple beta = encode_solution(w, *sigmas, 2);

  // Words at the cells of a valid encoding are admissible (this is
  // exactly axioms I and II pointwise), and stay admissible under the
  // reflection bookkeeping.
  Mix64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const long long i = beta.i_lo + rng.below(beta.i_extent());
    const long long j = beta.j_lo + rng.below(beta.j_extent());
    std::vector<int> word = omega_word_at(beta, i, j);
    CHECK(omega_contains(params, word));
    CHECK(omega_tilde_contains(params, 0, word));
    std::vector<int> flipped(word.size());
    for (std::size_t k = 0; k < word.size(); ++k) flipped[k] = 1 - word[k];
    CHECK(omega_tilde_contains(params, 1, flipped));
  }

  // Flipping every bit of a word need not leave the admissible set (a
  // constant line flips to another constant line), which is why the
  // reflected variant tracks the reflection marker instead of flipping
  // membership.  A flip that does leave: the line through (0, 1) has
  // digit 3 at n = 3, so its flip has a zero digit there.
  std::vector<int> w01 = omega_word_at(beta, 0, 1);
  std::vector<int> w01_flip(w01.size());
  for (std::size_t k = 0; k < w01.size(); ++k) w01_flip[k] = 1 - w01[k];
  CHECK(omega_contains(params, w01));
  CHECK(!omega_contains(params, w01_flip));
  CHECK(omega_tilde_contains(params, 1, w01_flip));
  CHECK(!omega_tilde_contains(params, 0, w01_flip));

  // Spoiling the board side digit of one column to zero leaves the
  // admissible set.
  std::vector<int> word = omega_word_at(beta, 0, 0);
  std::vector<int> spoiled = word;
  for (int b = 0; b < params.s0; ++b) {
    spoiled[static_cast<std::size_t>(omega_index(params, 1, b, 7))] = 0;
  }
  CHECK(!omega_contains(params, spoiled));

  // Column/board disagreement off the zero class is rejected.
  std::vector<int> clash = word;
  const auto idx0 = static_cast<std::size_t>(omega_index(params, 0, 0, 1));
  const auto idx1 = static_cast<std::size_t>(omega_index(params, 0, 1, 1));
  // board digit at n=1 for the row m=0 line is f_4(0+1... the line i=0,
  // j=0 has board digits f_4(0) = 1; set the column side to 2.
  clash[idx0] = 0;
  clash[idx1] = 1;
  CHECK(!omega_contains(params, clash));

  CHECK_THROWS_AS(omega_contains(params, std::vector<int>(63, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(omega_tilde_contains(params, 2, word),
                  std::invalid_argument);
}

TEST_CASE("property assembly reports the symbolic shape") {
  const BoardParams params;
  PropertySReport rep = assemble_property_S(params, false);
  CHECK(rep.group == GroupSpec{2, {2, 2, 2}});
  // 1 + 2 s0 N = 1 + 2*2*16 = 65 component functions; the modulus
  // exponent is the least M with 2^M > 2*65 + 4 = 134.
  CHECK(rep.component_count == 65);
  CHECK(rep.m_exponent == 8);
  CHECK(rep.omega_arity == 64);
  CHECK(rep.periodicity_conjuncts == 64);
  CHECK(rep.permutation_conjuncts == 16);
  CHECK(!rep.wrapper.has_value());
  CHECK(!rep.tiling.has_value());

  PropertySReport rep3 = assemble_property_S(BoardParams{3}, false);
  CHECK(rep3.component_count == 1 + 2 * 3 * 64);
  CHECK(rep3.m_exponent == 10);  // 2^10 = 1024 > 2*385 + 4 = 774

  CHECK_THROWS_WITH_AS(assemble_property_S(params, false, 3, {}, true),
                       Contains("requires toy mode"), std::invalid_argument);
}

TEST_CASE("toy property assembly compiles and hits the tiling cap") {
  const BoardParams params;
  PropertySReport toy = assemble_property_S(params, true, 3);
  REQUIRE(toy.wrapper.has_value());
  // Visible tuple (alpha_*, alpha_{a,n}) of 7 components; the least M
  // with 2^M > 2*7 + 4 = 18 is 5.
  CHECK(toy.component_count == 7);
  CHECK(toy.m_exponent == 5);
  CHECK(toy.omega_arity == 6);
  CHECK(toy.permutation_conjuncts == 3);
  CHECK(toy.wrapper->inner.components.size() == 35);
  CHECK(toy.wrapper->quantified.size() == 28);
  CHECK(toy.wrapper->inner.components.size() -
            toy.wrapper->quantified.size() ==
        7);
  CHECK(!toy.tiling.has_value());

  CHECK_THROWS_AS(assemble_property_S(params, true, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_property_S(params, true, 4),
                  std::invalid_argument);

  // The auxiliary components blow the product codomain far past the
  // compiler's 2^20 cell cap, and the error carries the counts.
  CHECK_THROWS_WITH_AS(
      assemble_property_S(params, true, 3, {}, true),
      Contains("35 components of Z/2^5 give a product codomain of 2^175"),
      std::length_error);
}

TEST_CASE("toy property solutions on a quotient match the predicate") {
  const BoardParams params;
  const GroupSpec g{2, {2, 2, 2}};
  PeriodLattice lat{g,
                    {make_element(g, {4, 0, 0, 0, 0}),
                     make_element(g, {0, 4, 0, 0, 0})}};
  Quotient quo(g, lat);
  REQUIRE(quo.size() == 128);

  // Candidates are built from the intended solution shape: boolean
  // patterns p_{a,n} on Z/4 transported along (-n, 1), the column side
  // alternating (the width-one permutation axiom), everything reflected
  // through the third torsion coordinate, optionally globally flipped.
  auto fill_family = [&](const ExistentialWrapper& wrapper, long long m_exp,
                         long long columns, const std::vector<int>& phases,
                         const std::vector<std::vector<int>>& board_rows,
                         bool reflect) {
    FunctionFamily fam;
    fam.domain = g;
    fam.lattice = lat;
    fam.components = wrapper.inner.components;
    fam.values.assign(fam.components.size(), {});
    for (long long wcomp = 0; wcomp < 1 + 2 * columns; ++wcomp) {
      fam.values[static_cast<std::size_t>(wcomp)].assign(
          static_cast<std::size_t>(quo.size()), 0);
    }
    const long long modulus = 1LL << m_exp;
    for (long long cell = 0; cell < quo.size(); ++cell) {
      const GroupElement rep = quo.representative(cell);
      const long long x = rep.coords[0], y = rep.coords[1];
      const long long eps = rep.coords[2];
      auto val = [&](int p) {
        long long out = (eps == 0) ? p : 1 - p;
        if (reflect) out = 1 - out;
        return mod_pos(out, modulus);
      };
      fam.values[0][static_cast<std::size_t>(cell)] = val(0);
      for (long long n = 1; n <= columns; ++n) {
        const long long k = mod_pos(x + y * n, 4);
        const int p0 = static_cast<int>(
            mod_pos(k + phases[static_cast<std::size_t>(n - 1)], 2));
        const int p1 = board_rows[static_cast<std::size_t>(n - 1)]
                                 [static_cast<std::size_t>(k)];
        fam.values[static_cast<std::size_t>(n)]
                  [static_cast<std::size_t>(cell)] = val(p0);
        fam.values[static_cast<std::size_t>(columns + n)]
                  [static_cast<std::size_t>(cell)] = val(p1);
      }
    }
    return fam;
  };

  SUBCASE("the full predicate accepts every candidate of the right shape") {
    PropertySReport toy = assemble_property_S(params, true, 3);
    Mix64 rng(555);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<int> phases = {static_cast<int>(rng.below(2)),
                                 static_cast<int>(rng.below(2)),
                                 static_cast<int>(rng.below(2))};
      std::vector<std::vector<int>> rows(3, std::vector<int>(4));
      for (auto& row : rows) {
        for (auto& v : row) v = static_cast<int>(rng.below(2));
      }
      FunctionFamily fam = fill_family(*toy.wrapper, toy.m_exponent, 3,
                                       phases, rows, trial % 2 == 1);
      WeakCheckResult res = check_weak_property(*toy.wrapper, fam);
      CHECK(res.satisfiable);
    }
  }

  SUBCASE("structural violations are refuted") {
    PropertySReport toy = assemble_property_S(params, true, 3);
    std::vector<std::vector<int>> rows = {
        {0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 0, 1}};
    FunctionFamily good = fill_family(*toy.wrapper, toy.m_exponent, 3,
                                      {0, 1, 0}, rows, false);

    // Column side of n=1 made constant: the alternation forced by the
    // width-one permutation conjunct fails.
    FunctionFamily flat = good;
    for (long long cell = 0; cell < quo.size(); ++cell) {
      const long long eps = quo.representative(cell).coords[2];
      flat.values[1][static_cast<std::size_t>(cell)] = eps == 0 ? 0 : 1;
    }
    CHECK(!check_weak_property(*toy.wrapper, flat).satisfiable);

    // Board side of n=2 replaced by a pattern that is not invariant
    // under ((-2, 1), 0): the shift drops (x + y) mod 4 by one.
    FunctionFamily skew = good;
    for (long long cell = 0; cell < quo.size(); ++cell) {
      const GroupElement rep = quo.representative(cell);
      const int p =
          static_cast<int>(mod_pos(rep.coords[0] + rep.coords[1], 4) % 2);
      skew.values[5][static_cast<std::size_t>(cell)] =
          rep.coords[2] == 0 ? p : 1 - p;
    }
    CHECK(!check_weak_property(*toy.wrapper, skew).satisfiable);

    // A visible component that is not boolean-formed at all.
    FunctionFamily wide = good;
    for (long long cell = 0; cell < quo.size(); ++cell) {
      wide.values[0][static_cast<std::size_t>(cell)] =
          mod_pos(quo.representative(cell).coords[0], 4);
    }
    CHECK(!check_weak_property(*toy.wrapper, wide).satisfiable);
  }

  SUBCASE("a hand-picked predicate is matched exhaustively") {
    // One column pair, predicate "column side equals board side".  The
    // candidates enumerate every phase, every board pattern on Z/4 and
    // both reflections; the compiled property must agree with the
    // pointwise oracle on all 64.
    PropertySReport tiny = assemble_property_S(
        params, true, 1,
        [](const std::vector<int>& word) { return word[0] == word[1]; });
    REQUIRE(tiny.wrapper.has_value());
    CHECK(tiny.m_exponent == 4);  // 2^4 = 16 > 2*3 + 4
    long long agree = 0, total = 0, sat_count = 0;
    for (int phase = 0; phase < 2; ++phase) {
      for (int mask = 0; mask < 16; ++mask) {
        for (int reflect = 0; reflect < 2; ++reflect) {
          std::vector<std::vector<int>> rows = {{(mask >> 0) & 1,
                                                 (mask >> 1) & 1,
                                                 (mask >> 2) & 1,
                                                 (mask >> 3) & 1}};
          FunctionFamily fam = fill_family(*tiny.wrapper, tiny.m_exponent,
                                           1, {phase}, rows, reflect == 1);
          bool expected = true;
          for (long long k = 0; k < 4; ++k) {
            const int p0 = static_cast<int>((k + phase) % 2);
            const int p1 = (mask >> k) & 1;
            if (p0 != p1) expected = false;
          }
          WeakCheckResult res = check_weak_property(*tiny.wrapper, fam);
          ++total;
          if (res.satisfiable == expected) ++agree;
          if (res.satisfiable) ++sat_count;
        }
      }
    }
    CHECK(total == 64);
    CHECK(agree == 64);
    // Exactly the two alternating boards, each in both reflections.
    CHECK(sat_count == 4);
  }
}
