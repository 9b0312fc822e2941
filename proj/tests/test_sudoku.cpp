#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "forge/sudoku.hpp"

using namespace forge;

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

// Independent oracle for f_q: write |n| in base q and take the last
// nonzero digit, adjusting the sign back at the end.
long long last_digit_oracle(long long q, long long n) {
  if (n == 0) {
    return 1;
  }
  const bool neg = n < 0;
  unsigned long long mag = neg ? static_cast<unsigned long long>(-(n + 1)) + 1
                               : static_cast<unsigned long long>(n);
  std::vector<long long> digits;
  while (mag > 0) {
    digits.push_back(static_cast<long long>(mag % static_cast<unsigned long long>(q)));
    mag /= static_cast<unsigned long long>(q);
  }
  long long d = 0;
  for (long long digit : digits) {
    if (digit != 0) {
      d = digit;
      break;
    }
  }
  return neg ? mod_pos(-d, q) : d;
}

struct OracleStats {
  int order = kOrderBottom;
  long long step = 0;
  long long slope = 0;
  long long intercept = 0;
  long long residue = 0;
  long long modulus = 0;
};

bool operator==(const OracleStats& x, const OracleStats& y) {
  return x.order == y.order && x.step == y.step && x.slope == y.slope &&
         x.intercept == y.intercept && x.residue == y.residue &&
         x.modulus == y.modulus;
}

// Expected statistics for g(n) = c f_q(a0 n + b0), computed from the
// generator: absorb the odd scale, strip common powers of q, then read
// the step, the affine part, and the bad coset directly.
OracleStats stats_of_generator(const BoardParams& params, long long a0,
                               long long b0, long long c) {
  const long long q = params.q();
  const long long n_count = params.board_n();
  long long a = a0 * c;
  long long b = b0 * c;
  if (a == 0 && b == 0) {
    b = c;  // f_q(0) = 1, so the sequence is constant c
  }
  while (a != 0 && a % q == 0 && b % q == 0) {
    a /= q;
    b /= q;
  }
  if (a == 0) {
    while (b % q == 0) {
      b /= q;
    }
  }
  OracleStats st;
  st.step = mod_pos(a, q);
  st.slope = st.step;
  st.intercept = mod_pos(b, q);
  std::vector<long long> bad;
  for (long long n = 1; n <= n_count; ++n) {
    if (mod_pos(a * n + b, q) == 0) {
      bad.push_back(n);
    }
  }
  if (!bad.empty()) {
    REQUIRE(st.step != 0);
    int order = 0;
    long long s = st.step;
    while (s % 2 == 0) {
      s /= 2;
      ++order;
    }
    st.order = order;
    st.modulus = q >> order;
    st.residue = bad.front() % st.modulus;
    // The bad coset meets {1..N} in exactly N 2^order / q points.
    CHECK(static_cast<long long>(bad.size()) * q == n_count * (1LL << order));
  }
  return st;
}

SudokuWindow standard_window(const BoardParams& params, long long m_lo,
                             long long m_hi) {
  const long long q = params.q();
  return make_window(params, m_lo, m_hi, [q](long long, long long m) {
    return static_cast<int>(f_q(q, m));
  });
}

bool stats_equal(const LineStats& got, const OracleStats& want) {
  return got.order == want.order && got.step == want.step &&
         got.slope == want.slope && got.intercept == want.intercept &&
         got.bad_coset.residue == want.residue &&
         got.bad_coset.modulus == want.modulus;
}

}  // namespace

TEST_CASE("last nonzero digit function") {
  CHECK(f_q(4, 7) == 3);
  CHECK(f_q(4, 8) == 2);
  CHECK(f_q(4, 0) == 1);
  const std::vector<long long> table = {1, 2, 3, 1, 1, 2, 3, 2,
                                        1, 2, 3, 3, 1, 2, 3, 1};
  for (long long n = 1; n <= 16; ++n) {
    CHECK(f_q(4, n) == table[static_cast<std::size_t>(n - 1)]);
  }

  for (long long q : {4LL, 8LL, 16LL}) {
    for (long long n = -2000; n <= 2000; ++n) {
      REQUIRE(f_q(q, n) == last_digit_oracle(q, n));
    }
  }

  // Identities: f_q(q n) = f_q(n); f_q(n) = n mod q off multiples of q;
  // f_q(a n) = a f_q(n) mod q for odd a and n != 0.
  Mix64 mix(2026);
  for (int trial = 0; trial < 2000; ++trial) {
    const long long q = 1LL << (2 + mix.below(3));
    const long long n = mix.below(2000000) - 1000000;
    CHECK(f_q(q, q * n) == f_q(q, n));
    if (n % q != 0) {
      CHECK(f_q(q, n) == mod_pos(n, q));
    }
    if (n != 0) {
      const long long a = 2 * mix.below(50) + 1;
      CHECK(f_q(q, a * n) == mod_pos(a * f_q(q, n), q));
    }
  }

  CHECK_THROWS_AS(f_q(1, 5), std::invalid_argument);
}

TEST_CASE("sequence analysis agrees with the enumerated corpus") {
  BoardParams params;  // q = 4, N = 16
  const long long q = params.q();
  const long long n_count = params.board_n();

  // Every sequence c f_q(a n + b) with a, b below q^4 and c odd; larger
  // coefficients only repeat these values at this length.
  std::map<std::vector<int>, OracleStats> corpus;
  const long long bound = q * q * q * q;
  std::vector<int> g(static_cast<std::size_t>(n_count));
  for (long long c = 1; c < q; c += 2) {
    for (long long a = 0; a < bound; ++a) {
      for (long long b = 0; b < bound; ++b) {
        for (long long n = 1; n <= n_count; ++n) {
          g[static_cast<std::size_t>(n - 1)] =
              static_cast<int>(mod_pos(c * f_q(q, a * n + b), q));
        }
        const OracleStats st = stats_of_generator(params, a, b, c);
        const auto ins = corpus.emplace(g, st);
        if (!ins.second) {
          // Statistics are intrinsic to the sequence: every generator of
          // the same value vector must produce the same statistics.
          REQUIRE(ins.first->second == st);
        }
      }
    }
  }
  CHECK(corpus.size() == 213);

  for (const auto& entry : corpus) {
    const auto stats = analyze_sequence(params, entry.first);
    REQUIRE(stats.has_value());
    CHECK(stats_equal(*stats, entry.second));
    CHECK(stats->witness_c % 2 != 0);
    CHECK(mod_pos(stats->witness_a, q) == stats->step);
    for (long long n = 1; n <= n_count; ++n) {
      REQUIRE(mod_pos(stats->witness_c *
                          f_q(q, stats->witness_a * n + stats->witness_b),
                      q) == entry.first[static_cast<std::size_t>(n - 1)]);
    }
  }

  // A sequence breaking every affine fit is rejected.
  const std::vector<int> outsider = {1, 3, 1, 1, 1, 1, 1, 1,
                                     1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(corpus.count(outsider) == 0);
  CHECK_FALSE(analyze_sequence(params, outsider).has_value());

  // Single-cell mutations: acceptance must coincide with membership.
  Mix64 mix(777);
  for (const auto& entry : corpus) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<int> mutant = entry.first;
      const std::size_t pos =
          static_cast<std::size_t>(mix.below(n_count));
      const int bump = 1 + static_cast<int>(mix.below(q - 2));
      mutant[pos] = 1 + static_cast<int>(mod_pos(mutant[pos] - 1 + bump, q - 1));
      const bool member = corpus.count(mutant) != 0;
      const auto verdict = analyze_sequence(params, mutant);
      REQUIRE(verdict.has_value() == member);
    }
  }

  CHECK_THROWS_AS(analyze_sequence(params, std::vector<int>(5, 1)),
                  std::invalid_argument);
  std::vector<int> with_zero(static_cast<std::size_t>(n_count), 1);
  with_zero[3] = 0;
  CHECK_THROWS_AS(analyze_sequence(params, with_zero), std::invalid_argument);
}

TEST_CASE("statistics of the featured lines") {
  BoardParams params;
  const long long q = params.q();
  std::vector<int> g(16);

  for (long long n = 1; n <= 16; ++n) {
    g[static_cast<std::size_t>(n - 1)] = static_cast<int>(f_q(q, 12 - n));
  }
  auto stats = analyze_sequence(params, g);
  REQUIRE(stats.has_value());
  CHECK(stats->step == 3);
  CHECK(stats->order == 0);
  CHECK(stats->bad_coset.residue == 0);
  CHECK(stats->bad_coset.modulus == 4);
  CHECK(stats->slope == 3);
  CHECK(stats->intercept == 0);

  for (long long n = 1; n <= 16; ++n) {
    g[static_cast<std::size_t>(n - 1)] = static_cast<int>(f_q(q, 2 * (n - 8)));
  }
  stats = analyze_sequence(params, g);
  REQUIRE(stats.has_value());
  CHECK(stats->step == 2);
  CHECK(stats->order == 1);
  CHECK(stats->bad_coset.residue == 0);
  CHECK(stats->bad_coset.modulus == 2);
  CHECK(stats->slope == 2);
  CHECK(stats->intercept == 0);

  std::fill(g.begin(), g.end(), 2);
  stats = analyze_sequence(params, g);
  REQUIRE(stats.has_value());
  CHECK(stats->step == 0);
  CHECK(stats->order == kOrderBottom);
  CHECK(stats->bad_coset.empty());
  CHECK(stats->intercept == 2);
}

TEST_CASE("sequence analysis at base eight") {
  BoardParams params;
  params.s0 = 3;
  const long long q = params.q();
  const long long n_count = params.board_n();
  Mix64 mix(4242);
  std::vector<int> g(static_cast<std::size_t>(n_count));
  for (int trial = 0; trial < 400; ++trial) {
    const long long a = mix.below(q * q * q);
    const long long b = mix.below(q * q * q);
    const long long c = 2 * mix.below(q / 2) + 1;
    for (long long n = 1; n <= n_count; ++n) {
      g[static_cast<std::size_t>(n - 1)] =
          static_cast<int>(mod_pos(c * f_q(q, a * n + b), q));
    }
    const auto stats = analyze_sequence(params, g);
    REQUIRE(stats.has_value());
    CHECK(stats_equal(*stats, stats_of_generator(params, a, b, c)));
    for (long long n = 1; n <= n_count; ++n) {
      REQUIRE(mod_pos(stats->witness_c *
                          f_q(q, stats->witness_a * n + stats->witness_b),
                      q) == g[static_cast<std::size_t>(n - 1)]);
    }
  }
}

TEST_CASE("sudoku verification on whole windows") {
  BoardParams params;
  const long long q = params.q();

  const SudokuWindow standard = standard_window(params, -300, 300);
  const SudokuReport pass = is_sudoku_solution(standard, 16);
  CHECK(pass.pass);
  CHECK(pass.lines_checked > 600);

  const SudokuWindow constant =
      make_window(params, -40, 40, [](long long, long long) { return 2; });
  CHECK(is_sudoku_solution(constant).pass);

  // A single wrong digit breaks some fully contained line through it.
  SudokuWindow broken = standard_window(params, -80, 80);
  const long long bad_n = 5;
  const long long bad_m = 17;
  const int old = broken.at(bad_n, bad_m);
  broken.rows[static_cast<std::size_t>(bad_m - broken.m_lo)]
      [static_cast<std::size_t>(bad_n - 1)] =
      1 + static_cast<int>(mod_pos(old, q - 1));
  const SudokuReport fail = is_sudoku_solution(broken, 4);
  CHECK_FALSE(fail.pass);
  CHECK(fail.first_failure.slope * bad_n + fail.first_failure.intercept ==
        bad_m);
}

TEST_CASE("good columns and their permutations") {
  BoardParams params;
  const long long q = params.q();
  const long long n_count = params.board_n();

  const SudokuWindow standard = standard_window(params, -16, 15);
  const auto sigmas = has_good_columns(standard);
  REQUIRE(sigmas.has_value());
  REQUIRE(sigmas->size() == static_cast<std::size_t>(n_count));
  for (const std::vector<int>& sigma : *sigmas) {
    for (long long rho = 0; rho < q; ++rho) {
      CHECK(sigma[static_cast<std::size_t>(rho)] == rho);
    }
  }

  const SudokuWindow constant =
      make_window(params, 0, 15, [](long long, long long) { return 2; });
  CHECK_FALSE(has_good_columns(constant).has_value());

  // Construct a window from known permutations and recover them: column
  // n maps residue rho to rho + n, with the zero class filled by a
  // non-constant pattern.
  const SudokuWindow shuffled =
      make_window(params, 0, 31, [q](long long n, long long m) {
        const long long rho = mod_pos(m, q);
        const long long v = mod_pos(rho + n, q);
        if (v != 0) {
          return static_cast<int>(v);
        }
        return static_cast<int>(f_q(q, (m - rho) / q + n));
      });
  const auto recovered = has_good_columns(shuffled);
  REQUIRE(recovered.has_value());
  for (long long n = 1; n <= n_count; ++n) {
    for (long long rho = 0; rho < q; ++rho) {
      CHECK((*recovered)[static_cast<std::size_t>(n - 1)]
            [static_cast<std::size_t>(rho)] == mod_pos(rho + n, q));
    }
  }

  const SudokuWindow shallow = standard_window(params, 0, 5);
  CHECK_THROWS_AS(has_good_columns(shallow), std::invalid_argument);
}

TEST_CASE("digit densities") {
  BoardParams params;
  const long long q = params.q();

  // Standard window over m in [-q^3, q^3]: every digit close to 1/(q-1).
  const SudokuWindow standard = standard_window(params, -64, 64);
  const Rational third = Rational(1) / Rational(3);
  const Rational slack = Rational(2) / Rational(standard.height());
  for (int digit = 1; digit < q; ++digit) {
    const Rational density = digit_density(standard, digit);
    CHECK(third - slack <= density);
    CHECK(density <= third + slack);
  }
  CHECK(digit_density(standard, 3) == third);

  const SudokuWindow constant =
      make_window(params, 0, 20, [](long long, long long) { return 2; });
  CHECK(digit_density(constant, 2) == Rational(1));
  CHECK(digit_density(constant, 1) == Rational(0));

  // Good columns force every digit under 2/q plus a boundary term.
  const SudokuWindow shuffled =
      make_window(params, 0, 31, [q](long long n, long long m) {
        const long long rho = mod_pos(m, q);
        const long long v = mod_pos(rho + n, q);
        if (v != 0) {
          return static_cast<int>(v);
        }
        return static_cast<int>(f_q(q, (m - rho) / q + n));
      });
  REQUIRE(has_good_columns(shuffled).has_value());
  const Rational bound =
      Rational(2) / Rational(q) + Rational(2) / Rational(shuffled.height());
  for (int digit = 1; digit < q; ++digit) {
    CHECK(digit_density(shuffled, digit) <= bound);
  }

  CHECK_THROWS_AS(digit_density(standard, 0), std::invalid_argument);
  CHECK_THROWS_AS(digit_density(standard, 4), std::invalid_argument);
}

TEST_CASE("solution class is invariant under board symmetries") {
  BoardParams params;
  const long long q = params.q();
  const long long n_count = params.board_n();

  // m -> a m + b n + c with a odd: lines map to lines.
  const SudokuWindow twisted =
      make_window(params, -30, 30, [q](long long n, long long m) {
        return static_cast<int>(f_q(q, 3 * m + n + 2));
      });
  CHECK(is_sudoku_solution(twisted, 2).pass);

  // Reflection n -> N + 1 - n of a genuinely n-dependent solution.
  const SudokuWindow reflected =
      make_window(params, -40, 40, [q, n_count](long long n, long long m) {
        return static_cast<int>(f_q(q, m + (n_count + 1 - n)));
      });
  CHECK(is_sudoku_solution(reflected, 2).pass);

  // Odd rescaling of the digits.
  const SudokuWindow scaled =
      make_window(params, -40, 40, [q](long long n, long long m) {
        return static_cast<int>(mod_pos(3 * f_q(q, m + n), q));
      });
  CHECK(is_sudoku_solution(scaled, 2).pass);
}

TEST_CASE("high order lines are rare") {
  BoardParams params;
  const long long q = params.q();
  const SudokuWindow standard = standard_window(params, -300, 300);
  // Over each slope, the fraction of intercepts whose line has order o
  // is at most 2^{1-o}.
  for (long long j = 1; j <= 3; ++j) {
    std::map<int, long long> counts;
    long long total = 0;
    std::vector<int> g(16);
    for (long long i = standard.m_lo - j; i + 16 * j <= standard.m_hi; ++i) {
      for (long long n = 1; n <= 16; ++n) {
        g[static_cast<std::size_t>(n - 1)] = standard.at(n, j * n + i);
      }
      const auto stats = analyze_sequence(params, g);
      REQUIRE(stats.has_value());
      ++counts[stats->order];
      ++total;
    }
    REQUIRE(total > 0);
    for (const auto& [order, count] : counts) {
      if (order >= 0) {
        // count / total <= 2^{1 - order}
        CHECK(count <= 2 * total / (1LL << order));
      }
    }
  }
}

TEST_CASE("rigidity of affine agreement on an interval") {
  BoardParams params;
  const long long q = params.q();
  const long long n_count = params.board_n();

  // The standard line g(n) = f_4(n) agrees with alpha(n) = n everywhere
  // off the zeros, so both hypothesis and conclusion hold.
  CHECK(check_rigid_out(params, 1, 0, 1, 1, 0, 1));

  // Cautionary constant instance: g = 2 matches alpha = 2n at every odd
  // n; the implication still holds on the whole range.
  CHECK(check_rigid_out(params, 0, 2, 1, 2, 0, 1));

  // Exhaustive sweep at q = 4: for every class member, every affine
  // function, and every 8-point interval, agreement off the zeros on the
  // interval propagates to the whole range.
  std::map<std::vector<int>, LineStats> members;
  std::vector<int> g(static_cast<std::size_t>(n_count));
  for (long long c = 1; c < q; c += 2) {
    for (long long a = 0; a < 256; ++a) {
      for (long long b = 0; b < 256; ++b) {
        for (long long n = 1; n <= n_count; ++n) {
          g[static_cast<std::size_t>(n - 1)] =
              static_cast<int>(mod_pos(c * f_q(q, a * n + b), q));
        }
        if (members.count(g) == 0) {
          const auto stats = analyze_sequence(params, g);
          REQUIRE(stats.has_value());
          members.emplace(g, *stats);
        }
      }
    }
  }
  long long instances = 0;
  for (const auto& [vec, stats] : members) {
    for (long long slope = 0; slope < q; ++slope) {
      for (long long intercept = 0; intercept < q; ++intercept) {
        for (long long start = 1; start + 7 <= n_count; ++start) {
          ++instances;
          REQUIRE(check_rigid_out(params, stats.witness_a, stats.witness_b,
                                  stats.witness_c, slope, intercept, start));
        }
      }
    }
  }
  CHECK(instances == 213 * q * q * 9);

  CHECK_THROWS_AS(check_rigid_out(params, 1, 0, 2, 1, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_rigid_out(params, 1, 0, 1, 1, 0, 10),
                  std::invalid_argument);
}

TEST_CASE("window construction guards") {
  BoardParams params;
  CHECK_THROWS_AS(
      make_window(params, 5, 4, [](long long, long long) { return 1; }),
      std::invalid_argument);
  CHECK_THROWS_AS(
      make_window(params, 0, 3, [](long long, long long) { return 0; }),
      std::invalid_argument);
  CHECK_THROWS_AS(
      make_window(params, 0, 3, [](long long, long long) { return 4; }),
      std::invalid_argument);
  BoardParams tiny;
  tiny.s0 = 1;
  CHECK_THROWS_AS(
      make_window(tiny, 0, 3, [](long long, long long) { return 1; }),
      std::invalid_argument);

  const SudokuWindow w =
      make_window(params, -2, 2, [](long long, long long) { return 3; });
  CHECK(w.height() == 5);
  CHECK(w.at(1, -2) == 3);
  CHECK_THROWS_AS(w.at(0, 0), std::out_of_range);
  CHECK_THROWS_AS(w.at(1, 3), std::out_of_range);
}
