#include "forge/encoding.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

namespace forge {

namespace {

long long mod_pos(long long x, long long m) { return ((x % m) + m) % m; }

void validate_params(const BoardParams& params) {
  if (params.s0 < 2 || params.s0 > 15) {
    throw std::invalid_argument("board parameters: s0 must be in [2, 15]");
  }
}

void validate_beta(const BetaTuple& beta) {
  validate_params(beta.params);
  if (beta.i_lo > beta.i_hi || beta.j_lo > beta.j_hi) {
    throw std::invalid_argument("beta tuple: empty rectangle");
  }
  const long long expected = beta.function_count() * beta.cells();
  if (static_cast<long long>(beta.bits.size()) != expected) {
    throw std::invalid_argument("beta tuple: bit storage size mismatch");
  }
  for (unsigned char b : beta.bits) {
    if (b > 1) {
      throw std::invalid_argument("beta tuple: bits must be 0 or 1");
    }
  }
}

std::size_t bit_index(const BetaTuple& beta, int a, int b, long long n,
                      long long i, long long j) {
  const int s0 = beta.params.s0;
  const long long big_n = beta.params.board_n();
  if (a < 0 || a > 1) {
    throw std::invalid_argument("beta access: side index must be 0 or 1");
  }
  if (b < 0 || b >= s0) {
    throw std::invalid_argument("beta access: bit position out of range");
  }
  if (n < 1 || n > big_n) {
    throw std::invalid_argument("beta access: column out of range");
  }
  if (!beta.in_window(i, j)) {
    throw std::invalid_argument("beta access: cell outside the rectangle");
  }
  const long long fn = (static_cast<long long>(a) * s0 + b) * big_n + (n - 1);
  const long long cell = (j - beta.j_lo) * beta.i_extent() + (i - beta.i_lo);
  return static_cast<std::size_t>(fn * beta.cells() + cell);
}

std::string cell_tag(long long i, long long j) {
  std::ostringstream out;
  out << "(i=" << i << ", j=" << j << ")";
  return out.str();
}

/** Per-axiom scans; each returns the first violation witness if any. */
std::optional<std::string> scan_axiom_i(const BetaTuple& beta) {
  const long long big_n = beta.params.board_n();
  std::vector<int> seq(static_cast<std::size_t>(big_n), 0);
  for (long long j = beta.j_lo; j <= beta.j_hi; ++j) {
    for (long long i = beta.i_lo; i <= beta.i_hi; ++i) {
      for (long long n = 1; n <= big_n; ++n) {
        const long long d = beta.digit(1, n, i, j);
        if (d == 0) {
          std::ostringstream out;
          out << cell_tag(i, j) << ": zero digit at n=" << n;
          return out.str();
        }
        seq[static_cast<std::size_t>(n - 1)] = static_cast<int>(d);
      }
      if (!analyze_sequence(beta.params, seq).has_value()) {
        return cell_tag(i, j) + ": line sequence is not in the recognized "
                                "class";
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> scan_axiom_ii(const BetaTuple& beta) {
  const long long big_n = beta.params.board_n();
  for (long long j = beta.j_lo; j <= beta.j_hi; ++j) {
    for (long long i = beta.i_lo; i <= beta.i_hi; ++i) {
      for (long long n = 1; n <= big_n; ++n) {
        const long long d0 = beta.digit(0, n, i, j);
        if (d0 == 0) continue;
        const long long d1 = beta.digit(1, n, i, j);
        if (d0 != d1) {
          std::ostringstream out;
          out << "(i=" << i << ", j=" << j << ", n=" << n
              << "): column digit " << d0 << " disagrees with board digit "
              << d1;
          return out.str();
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> scan_axiom_iii(const BetaTuple& beta) {
  const int s0 = beta.params.s0;
  const long long big_n = beta.params.board_n();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < s0; ++b) {
      for (long long n = 1; n <= big_n; ++n) {
        for (long long j = beta.j_lo; j < beta.j_hi; ++j) {
          for (long long i = beta.i_lo + n; i <= beta.i_hi; ++i) {
            if (beta.bit(a, b, n, i, j) != beta.bit(a, b, n, i - n, j + 1)) {
              std::ostringstream out;
              out << "beta(a=" << a << ", b=" << b << ", n=" << n
                  << ") differs between " << cell_tag(i, j) << " and "
                  << cell_tag(i - n, j + 1);
              return out.str();
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> scan_axiom_iv(const BetaTuple& beta) {
  const long long q = beta.params.q();
  const long long big_n = beta.params.board_n();
  for (long long n = 1; n <= big_n; ++n) {
    for (long long j = beta.j_lo; j <= beta.j_hi; ++j) {
      for (long long i0 = beta.i_lo; i0 + q - 1 <= beta.i_hi; ++i0) {
        unsigned long long seen = 0;
        for (long long t = 0; t < q; ++t) {
          const long long d = beta.digit(0, n, i0 + t, j);
          if ((seen >> d) & 1ULL) {
            std::ostringstream out;
            out << "(n=" << n << ", j=" << j
                << "): column-side digits on i in [" << i0 << ", "
                << (i0 + q - 1) << "] repeat " << d;
            return out.str();
          }
          seen |= 1ULL << d;
        }
      }
    }
  }
  return std::nullopt;
}

void require_checkable(const BetaTuple& beta) {
  validate_beta(beta);
  if (beta.i_extent() < beta.params.q()) {
    throw std::invalid_argument(
        "axiom check needs at least q columns in the i range");
  }
}

}  // namespace

long long binary_encode(const std::vector<int>& bits) {
  if (bits.empty() || bits.size() > 16) {
    throw std::invalid_argument("binary encoding: width must be in [1, 16]");
  }
  long long value = 0;
  for (std::size_t b = 0; b < bits.size(); ++b) {
    if (bits[b] != 0 && bits[b] != 1) {
      throw std::invalid_argument("binary encoding: bits must be 0 or 1");
    }
    value += static_cast<long long>(bits[b]) << b;
  }
  return value;
}

std::vector<int> binary_decode(long long value, int s0) {
  if (s0 < 1 || s0 > 16) {
    throw std::invalid_argument("binary encoding: width must be in [1, 16]");
  }
  if (value < 0 || value >= (1LL << s0)) {
    throw std::invalid_argument("binary encoding: value out of range");
  }
  std::vector<int> bits(static_cast<std::size_t>(s0));
  for (int b = 0; b < s0; ++b) {
    bits[static_cast<std::size_t>(b)] = static_cast<int>((value >> b) & 1);
  }
  return bits;
}

int BetaTuple::bit(int a, int b, long long n, long long i, long long j) const {
  return bits[bit_index(*this, a, b, n, i, j)];
}

void BetaTuple::set_bit(int a, int b, long long n, long long i, long long j,
                        int value) {
  if (value != 0 && value != 1) {
    throw std::invalid_argument("beta access: bits must be 0 or 1");
  }
  bits[bit_index(*this, a, b, n, i, j)] =
      static_cast<unsigned char>(value);
}

long long BetaTuple::digit(int a, long long n, long long i, long long j) const {
  long long value = 0;
  for (int b = 0; b < params.s0; ++b) {
    value += static_cast<long long>(bit(a, b, n, i, j)) << b;
  }
  return value;
}

void BetaTuple::set_digit(int a, long long n, long long i, long long j,
                          long long value) {
  if (value < 0 || value >= params.q()) {
    throw std::invalid_argument("beta access: digit out of range");
  }
  for (int b = 0; b < params.s0; ++b) {
    set_bit(a, b, n, i, j, static_cast<int>((value >> b) & 1));
  }
}

BetaTuple make_beta_tuple(const BoardParams& params, long long i_lo,
                          long long i_hi, long long j_lo, long long j_hi) {
  validate_params(params);
  if (i_lo > i_hi || j_lo > j_hi) {
    throw std::invalid_argument("beta tuple: empty rectangle");
  }
  BetaTuple beta;
  beta.params = params;
  beta.i_lo = i_lo;
  beta.i_hi = i_hi;
  beta.j_lo = j_lo;
  beta.j_hi = j_hi;
  beta.bits.assign(
      static_cast<std::size_t>(beta.function_count() * beta.cells()), 0);
  return beta;
}

BetaTuple encode_solution(const SudokuWindow& w,
                          const std::vector<std::vector<int>>& sigmas,
                          long long slope_cap) {
  validate_window(w);
  const long long q = w.params.q();
  const long long big_n = w.params.board_n();
  if (slope_cap < 0) {
    throw std::invalid_argument("encode: slope cap must be nonnegative");
  }
  if (static_cast<long long>(sigmas.size()) != big_n) {
    throw std::invalid_argument(
        "good-columns precondition unmet: one permutation per column "
        "required");
  }
  for (long long n = 1; n <= big_n; ++n) {
    const auto& table = sigmas[static_cast<std::size_t>(n - 1)];
    if (static_cast<long long>(table.size()) != q) {
      throw std::invalid_argument(
          "good-columns precondition unmet: permutation table must have q "
          "entries");
    }
    unsigned long long seen = 0;
    for (int value : table) {
      if (value < 0 || value >= q || ((seen >> value) & 1ULL)) {
        throw std::invalid_argument(
            "good-columns precondition unmet: table is not a permutation of "
            "the digit classes");
      }
      seen |= 1ULL << value;
    }
    for (long long m = w.m_lo; m <= w.m_hi; ++m) {
      const int s = table[static_cast<std::size_t>(mod_pos(m, q))];
      if (s != 0 && s != w.at(n, m)) {
        std::ostringstream out;
        out << "good-columns precondition unmet: F(n=" << n << ", m=" << m
            << ") = " << w.at(n, m) << " disagrees with sigma value " << s;
        throw std::invalid_argument(out.str());
      }
    }
  }

  const long long i_lo = w.m_lo + slope_cap * big_n;
  const long long i_hi = w.m_hi - slope_cap * big_n;
  if (i_lo > i_hi || i_hi - i_lo + 1 < q) {
    throw std::invalid_argument("window too short for slope cap");
  }
  BetaTuple beta = make_beta_tuple(w.params, i_lo, i_hi, -slope_cap,
                                   slope_cap);
  for (long long j = beta.j_lo; j <= beta.j_hi; ++j) {
    for (long long i = beta.i_lo; i <= beta.i_hi; ++i) {
      for (long long n = 1; n <= big_n; ++n) {
        const long long m = j * n + i;
        beta.set_digit(1, n, i, j, w.at(n, m));
        beta.set_digit(
            0, n, i, j,
            sigmas[static_cast<std::size_t>(n - 1)]
                  [static_cast<std::size_t>(mod_pos(m, q))]);
      }
    }
  }
  return beta;
}

AxiomReport check_axioms(const BetaTuple& beta) {
  require_checkable(beta);
  AxiomReport report;
  if (auto w = scan_axiom_i(beta)) {
    report.i.ok = false;
    report.i.witness = *w;
  }
  if (auto w = scan_axiom_ii(beta)) {
    report.ii.ok = false;
    report.ii.witness = *w;
  }
  if (auto w = scan_axiom_iii(beta)) {
    report.iii.ok = false;
    report.iii.witness = *w;
  }
  if (auto w = scan_axiom_iv(beta)) {
    report.iv.ok = false;
    report.iv.witness = *w;
  }
  return report;
}

std::optional<std::string> first_axiom_violation(const BetaTuple& beta) {
  require_checkable(beta);
  if (auto w = scan_axiom_iii(beta)) return "axiom III: " + *w;
  if (auto w = scan_axiom_iv(beta)) return "axiom IV: " + *w;
  if (auto w = scan_axiom_ii(beta)) return "axiom II: " + *w;
  if (auto w = scan_axiom_i(beta)) return "axiom I: " + *w;
  return std::nullopt;
}

bool mutation_pinned(const BetaTuple& beta, int a, long long n, long long i,
                     long long j) {
  validate_beta(beta);
  if (a < 0 || a > 1 || n < 1 || n > beta.params.board_n() ||
      !beta.in_window(i, j)) {
    throw std::invalid_argument("mutation query outside the tuple");
  }
  if (a == 0) return beta.i_extent() >= beta.params.q();
  return beta.in_window(i - n, j + 1) || beta.in_window(i + n, j - 1);
}

DecodedSolution decode_beta(const BetaTuple& beta) {
  require_checkable(beta);
  const long long q = beta.params.q();
  const long long big_n = beta.params.board_n();
  if (beta.j_lo > 0 || beta.j_hi < 0) {
    throw std::invalid_argument("decode needs the j = 0 row");
  }
  if (beta.i_extent() < 2 * q) {
    throw std::invalid_argument("decode needs an i range of at least 2q");
  }
  const AxiomReport report = check_axioms(beta);
  const std::pair<const AxiomCheck*, const char*> checks[] = {
      {&report.i, "axiom I"},
      {&report.ii, "axiom II"},
      {&report.iii, "axiom III"},
      {&report.iv, "axiom IV"},
  };
  for (const auto& [check, label] : checks) {
    if (!check->ok) {
      throw std::runtime_error(std::string("decode_beta: ") + label +
                               " fails: " + check->witness);
    }
  }

  DecodedSolution out;
  out.window = make_window(
      beta.params, beta.i_lo, beta.i_hi, [&](long long n, long long m) {
        return static_cast<int>(beta.digit(1, n, m, 0));
      });
  out.sigmas.assign(static_cast<std::size_t>(big_n),
                    std::vector<int>(static_cast<std::size_t>(q), 0));
  for (long long n = 1; n <= big_n; ++n) {
    auto& table = out.sigmas[static_cast<std::size_t>(n - 1)];
    for (long long i = beta.i_lo; i < beta.i_lo + q; ++i) {
      table[static_cast<std::size_t>(mod_pos(i, q))] =
          static_cast<int>(beta.digit(0, n, i, 0));
    }
  }

  const SudokuReport lines = is_sudoku_solution(out.window);
  if (!lines.pass) {
    throw std::runtime_error(
        "decode_beta: reconstructed window fails the line check: " +
        lines.reason);
  }
  for (long long n = 1; n <= big_n; ++n) {
    const auto& table = out.sigmas[static_cast<std::size_t>(n - 1)];
    for (long long m = beta.i_lo; m <= beta.i_hi; ++m) {
      const int s = table[static_cast<std::size_t>(mod_pos(m, q))];
      if (s != 0 && s != out.window.at(n, m)) {
        throw std::runtime_error(
            "decode_beta: reconstructed permutations disagree with the "
            "window");
      }
    }
  }
  if (!has_good_columns(out.window).has_value()) {
    throw std::runtime_error(
        "decode_beta: reconstructed window fails the column test");
  }
  return out;
}

long long omega_index(const BoardParams& params, int a, int b, long long n) {
  validate_params(params);
  const long long big_n = params.board_n();
  if (a < 0 || a > 1 || b < 0 || b >= params.s0 || n < 1 || n > big_n) {
    throw std::invalid_argument("word index out of range");
  }
  return (static_cast<long long>(a) * params.s0 + b) * big_n + (n - 1);
}

std::vector<int> omega_word_at(const BetaTuple& beta, long long i,
                               long long j) {
  validate_beta(beta);
  if (!beta.in_window(i, j)) {
    throw std::invalid_argument("beta access: cell outside the rectangle");
  }
  std::vector<int> word(
      static_cast<std::size_t>(2 * beta.params.s0 * beta.params.board_n()));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < beta.params.s0; ++b) {
      for (long long n = 1; n <= beta.params.board_n(); ++n) {
        word[static_cast<std::size_t>(omega_index(beta.params, a, b, n))] =
            beta.bit(a, b, n, i, j);
      }
    }
  }
  return word;
}

bool omega_contains(const BoardParams& params, const std::vector<int>& word) {
  validate_params(params);
  const long long big_n = params.board_n();
  if (static_cast<long long>(word.size()) != 2 * params.s0 * big_n) {
    throw std::invalid_argument("word length must be 2*s0*N");
  }
  for (int bit : word) {
    if (bit != 0 && bit != 1) {
      throw std::invalid_argument("word letters must be 0 or 1");
    }
  }
  auto digit = [&](int a, long long n) {
    long long value = 0;
    for (int b = 0; b < params.s0; ++b) {
      const auto idx =
          static_cast<std::size_t>(omega_index(params, a, b, n));
      value += static_cast<long long>(word[idx]) << b;
    }
    return value;
  };
  std::vector<int> seq(static_cast<std::size_t>(big_n));
  for (long long n = 1; n <= big_n; ++n) {
    const long long d1 = digit(1, n);
    if (d1 == 0) return false;
    seq[static_cast<std::size_t>(n - 1)] = static_cast<int>(d1);
    const long long d0 = digit(0, n);
    if (d0 != 0 && d0 != d1) return false;
  }
  return analyze_sequence(params, seq).has_value();
}

bool omega_tilde_contains(const BoardParams& params, int star,
                          const std::vector<int>& word) {
  if (star != 0 && star != 1) {
    throw std::invalid_argument("word letters must be 0 or 1");
  }
  if (star == 0) return omega_contains(params, word);
  std::vector<int> reflected(word.size());
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] != 0 && word[k] != 1) {
      throw std::invalid_argument("word letters must be 0 or 1");
    }
    reflected[k] = 1 - word[k];
  }
  return omega_contains(params, reflected);
}

PropertySReport assemble_property_S(
    const BoardParams& params, bool toy, long long toy_columns,
    const std::function<bool(const std::vector<int>&)>& toy_omega,
    bool compile_tiling) {
  validate_params(params);
  if (compile_tiling && !toy) {
    throw std::invalid_argument(
        "property assembly: tiling compilation requires toy mode");
  }
  PropertySReport report;
  report.group = GroupSpec{2, {2, 2, 2}};

  const long long columns = toy ? toy_columns : params.board_n();
  const int bit_positions = toy ? 1 : params.s0;
  if (toy && (toy_columns < 1 || 1 + 2 * toy_columns > 8)) {
    throw std::invalid_argument(
        "toy mode needs 1 + 2*toy_columns visible components, at most 8");
  }
  report.omega_arity = 2LL * bit_positions * columns;
  report.component_count = 1 + report.omega_arity;
  report.periodicity_conjuncts = report.omega_arity;
  report.permutation_conjuncts = columns;
  int m = 1;
  while (!((1LL << m) > 2 * report.component_count + 4)) ++m;
  report.m_exponent = m;
  if (!toy) return report;

  const GroupSpec& g = report.group;
  const GroupElement e = make_element(g, {0, 0, 1, 0, 0});
  const GroupElement e1 = make_element(g, {0, 0, 0, 1, 0});
  const GroupElement e2 = make_element(g, {0, 0, 0, 0, 1});
  const int count = static_cast<int>(report.component_count);
  const std::vector<GroupSpec> visible(
      static_cast<std::size_t>(count), GroupSpec{0, {1LL << m}});

  std::vector<ExistentialWrapper> parts;
  {
    PropertySpec sym;
    sym.kind = PropertySpec::Kind::kSymmetricBooleanConstraint;
    sym.domain = g;
    sym.width = count;
    sym.m_exponent = m;
    sym.e = e;
    sym.e_prime = e1;
    sym.e_second = e2;
    std::function<bool(const std::vector<int>&)> accept = toy_omega;
    if (!accept) {
      accept = [](const std::vector<int>&) { return true; };
    }
    sym.omega = [accept](const std::vector<int>& eps) {
      std::vector<int> word(eps.begin() + 1, eps.end());
      if (eps.front() == 1) {
        for (int& v : word) v = 1 - v;
      }
      return accept(word);
    };
    parts.push_back(compile_property(sym));
  }
  for (int a = 0; a < 2; ++a) {
    for (long long n = 1; n <= columns; ++n) {
      PropertySpec per;
      per.kind = PropertySpec::Kind::kPeriodic;
      per.domain = g;
      per.codomain = GroupSpec{0, {1LL << m}};
      per.directions = {make_element(g, {-n, 1, 0, 0, 0})};
      const int target = static_cast<int>(1 + a * columns + (n - 1));
      parts.push_back(lift_wrapper(compile_property(per), visible, {target}));
    }
  }
  for (long long n = 1; n <= columns; ++n) {
    PropertySpec perm;
    perm.kind = PropertySpec::Kind::kBooleanPeriodizedPermutation;
    perm.domain = g;
    perm.width = 1;
    perm.m_exponent = m;
    perm.e = e;
    perm.e_prime = e1;
    perm.e_second = e2;
    perm.permutation_direction = make_element(g, {1, 0, 0, 0, 0});
    const int target = static_cast<int>(1 + (n - 1));
    parts.push_back(lift_wrapper(compile_property(perm), visible, {target}));
  }
  report.wrapper = conjoin_wrappers(parts);

  if (compile_tiling) {
    try {
      report.tiling = functional_to_tiling(report.wrapper->inner);
    } catch (const std::length_error&) {
      const std::size_t total = report.wrapper->inner.components.size();
      std::ostringstream out;
      out << "property S tiling compilation cap exceeded: " << total
          << " components of Z/2^" << m << " give a product codomain of 2^"
          << (static_cast<long long>(total) * m) << " cells (cap 2^20)";
      throw std::length_error(out.str());
    }
  }
  return report;
}

}  // namespace forge
