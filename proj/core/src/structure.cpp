#include "forge/sudoku.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace forge {

namespace {

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

long long floor_div(long long a, long long b) {
  long long quo = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --quo;
  }
  return quo;
}

long long odd_inverse(long long u, long long q) {
  u = mod_pos(u, q);
  for (long long v = 1; v < q; v += 2) {
    if (mod_pos(u * v, q) == 1) {
      return v;
    }
  }
  throw std::logic_error("odd_inverse: unit has no inverse");
}

/** Throws invalid_argument naming `what` unless the values are affine mod q. */
void require_affine(const std::vector<long long>& values, long long q,
                    const std::string& what) {
  for (std::size_t k = 2; k < values.size(); ++k) {
    if (mod_pos(values[k] - 2 * values[k - 1] + values[k - 2], q) != 0) {
      throw std::invalid_argument("fit_pseudo_affine: " + what +
                                  " is not affine mod q");
    }
  }
}

}  // namespace

long long PseudoAffine::eval(long long n, long long m) const {
  const long long q = modulus;
  return mod_pos(a * n + b * m + c + d * (q / 4) * m * (m - n), q);
}

PseudoAffine fit_pseudo_affine(
    const std::vector<std::vector<long long>>& square, long long n0,
    long long m0, long long q) {
  if (q < 4 || (q & (q - 1)) != 0) {
    throw std::invalid_argument("fit_pseudo_affine: modulus must be 2^s0, s0 >= 2");
  }
  if (square.size() != 8) {
    throw std::invalid_argument("fit_pseudo_affine: square must have 8 rows");
  }
  for (const std::vector<long long>& row : square) {
    if (row.size() != 8) {
      throw std::invalid_argument("fit_pseudo_affine: square must have 8 columns");
    }
    for (long long v : row) {
      if (v < 0 || v >= q) {
        throw std::invalid_argument(
            "fit_pseudo_affine: values must be residues mod q");
      }
    }
  }
  auto cell = [&](long long u, long long v) {
    return square[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
  };

  // Precondition: rows, diagonals and anti-diagonals of the square are
  // affine mod q.  (Columns need not be: the quadratic term is even in m
  // only.)  Segments shorter than three cells are vacuously affine.
  std::vector<long long> line;
  for (long long v = 0; v < 8; ++v) {
    line.clear();
    for (long long u = 0; u < 8; ++u) {
      line.push_back(cell(u, v));
    }
    require_affine(line, q, "row m = " + std::to_string(m0 + v));
  }
  for (long long delta = -7; delta <= 7; ++delta) {
    line.clear();
    for (long long u = 0; u < 8; ++u) {
      const long long v = u + delta;
      if (v >= 0 && v < 8) {
        line.push_back(cell(u, v));
      }
    }
    require_affine(line, q,
                   "diagonal m - n = " + std::to_string(m0 - n0 + delta));
  }
  for (long long total = 0; total <= 14; ++total) {
    line.clear();
    for (long long u = 0; u < 8; ++u) {
      const long long v = total - u;
      if (v >= 0 && v < 8) {
        line.push_back(cell(u, v));
      }
    }
    require_affine(line, q,
                   "anti-diagonal m + n = " + std::to_string(m0 + n0 + total));
  }

  // Row slopes differ by d (q/4) between consecutive rows.
  const long long slope0 = mod_pos(cell(1, 0) - cell(0, 0), q);
  const long long slope1 = mod_pos(cell(1, 1) - cell(0, 1), q);
  const long long q4 = q / 4;
  const long long diff = mod_pos(slope0 - slope1, q);
  if (diff % q4 != 0) {
    throw std::runtime_error(
        "fit_pseudo_affine: the square is not pseudo-affine");
  }
  PseudoAffine psi;
  psi.modulus = q;
  psi.d = (diff / q4) % 4;
  psi.a = mod_pos(slope0 + psi.d * q4 * m0, q);
  const long long col_diff = cell(0, 1) - cell(0, 0);
  psi.b = mod_pos(col_diff - psi.d * q4 * (2 * m0 + 1 - n0), q);
  psi.c = mod_pos(cell(0, 0) - psi.a * n0 - psi.b * m0 -
                      psi.d * q4 * m0 * (m0 - n0),
                  q);
  for (long long u = 0; u < 8; ++u) {
    for (long long v = 0; v < 8; ++v) {
      if (psi.eval(n0 + u, m0 + v) != cell(u, v)) {
        throw std::runtime_error(
            "fit_pseudo_affine: the square is not pseudo-affine");
      }
    }
  }
  return psi;
}

std::pair<long long, long long> zero_set_coeffs(const PseudoAffine& psi) {
  const long long q = psi.modulus;
  if (q < 4 || (q & (q - 1)) != 0) {
    throw std::invalid_argument("zero_set_coeffs: modulus must be 2^s0, s0 >= 2");
  }
  if (mod_pos(psi.b, 2) != 1) {
    throw std::invalid_argument(
        "zero_set_coeffs: vertical coefficient must be odd");
  }
  // Normalize the vertical coefficient to one; the zero set is unchanged.
  const long long b_inv = odd_inverse(psi.b, q);
  const long long a1 = mod_pos(psi.a * b_inv, q);
  const long long c1 = mod_pos(psi.c * b_inv, q);
  const long long d1 = mod_pos(psi.d * b_inv, 4);
  const long long q4 = q / 4;
  const long long q2 = q / 2;
  const long long a_out =
      mod_pos(-a1 - (2 * a1 + 1) * d1 * c1 * q4 - d1 * q2 * ((a1 + 1) * a1 / 2),
              q);
  const long long c_out = mod_pos(-c1 - d1 * c1 * c1 * q4, q);
  for (long long n = 0; n < q; ++n) {
    for (long long m = 0; m < q; ++m) {
      const bool zero = psi.eval(n, m) == 0;
      const bool on_line = mod_pos(m - a_out * n - c_out, q) == 0;
      if (zero != on_line) {
        throw std::runtime_error(
            "zero_set_coeffs: closed form disagrees with the zero set");
      }
    }
  }
  return {a_out, c_out};
}

SudokuWindow shear_window(const SudokuWindow& w, long long a, long long b,
                          long long c) {
  validate_window(w);
  const long long q = w.params.q();
  if (mod_pos(b, 2) != 1) {
    throw std::invalid_argument("shear_window: scale must be odd");
  }
  const long long n_count = w.params.board_n();
  // Rows m of the output need m + a n + c inside [m_lo, m_hi] for every
  // n in 1..N; the binding columns are n = 1 and n = N.
  long long lo, hi;
  if (a >= 0) {
    lo = w.m_lo - c - a;
    hi = w.m_hi - c - a * n_count;
  } else {
    lo = w.m_lo - c - a * n_count;
    hi = w.m_hi - c - a;
  }
  if (lo > hi) {
    throw std::invalid_argument("shear_window: empty output window");
  }
  return make_window(w.params, lo, hi, [&](long long n, long long m) {
    return static_cast<int>(mod_pos(b * w.at(n, m + a * n + c), q));
  });
}

std::optional<long long> normal_form_d(const SudokuWindow& w) {
  validate_window(w);
  const long long q = w.params.q();
  const long long q4 = q / 4;
  const long long n_count = w.params.board_n();
  for (long long d = 0; d < 4; ++d) {
    bool ok = true;
    for (long long m = w.m_lo; m <= w.m_hi && ok; ++m) {
      if (mod_pos(m, q) == 0) {
        continue;
      }
      for (long long n = 1; n <= n_count; ++n) {
        if (w.at(n, m) != mod_pos(m + d * q4 * m * (m - n), q)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      return d;
    }
  }
  return std::nullopt;
}

NormalShear to_normal_form(const SudokuWindow& w, const PseudoAffine& psi) {
  validate_window(w);
  const long long q = w.params.q();
  if (psi.modulus != q) {
    throw std::invalid_argument("to_normal_form: modulus mismatch");
  }
  for (long long m = w.m_lo; m <= w.m_hi; ++m) {
    for (long long n = 1; n <= w.params.board_n(); ++n) {
      const long long value = psi.eval(n, m);
      if (value != 0 && value != w.at(n, m)) {
        throw std::invalid_argument(
            "to_normal_form: window disagrees with the pseudo-affine at (" +
            std::to_string(n) + ", " + std::to_string(m) + ")");
      }
    }
  }
  const auto line = zero_set_coeffs(psi);
  const SudokuWindow base = shear_window(w, line.first, 1, line.second);
  const long long q4 = q / 4;
  const long long n_count = w.params.board_n();
  for (long long scale = 1; scale < q; scale += 2) {
    for (long long d = 0; d < 4; ++d) {
      bool ok = true;
      for (long long m = base.m_lo; m <= base.m_hi && ok; ++m) {
        if (mod_pos(m, q) == 0) {
          continue;
        }
        for (long long n = 1; n <= n_count; ++n) {
          if (mod_pos(scale * base.at(n, m), q) !=
              mod_pos(m + d * q4 * m * (m - n), q)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        NormalShear result;
        result.a = line.first;
        result.b = scale;
        result.c = line.second;
        result.d = d;
        return result;
      }
    }
  }
  throw std::runtime_error(
      "to_normal_form: no scaling places the window in normal form");
}

SudokuWindow tetris(const SudokuWindow& w) {
  validate_window(w);
  const long long q = w.params.q();
  if (w.height() < q) {
    throw std::invalid_argument("tetris: window height must be at least q");
  }
  const long long lo = floor_div(w.m_lo + q - 1, q);
  const long long hi = floor_div(w.m_hi, q);
  return make_window(w.params, lo, hi, [&](long long n, long long m) {
    return w.at(n, q * m);
  });
}

DescentReport descent_check(const SudokuWindow& w, long long claimed_period) {
  validate_window(w);
  if (claimed_period < 1) {
    throw std::invalid_argument("descent_check: claimed period must be positive");
  }
  std::optional<long long> d0 = normal_form_d(w);
  if (!d0) {
    throw std::domain_error("descent_check: window is not in normal form");
  }
  const long long q = w.params.q();
  const long long n_count = w.params.board_n();
  DescentReport report;
  SudokuWindow cur = w;
  long long period = claimed_period;
  long long d = *d0;
  while (true) {
    if (period == 1) {
      // Vertical period one makes every column constant.
      for (long long n = 1; n <= n_count; ++n) {
        for (long long m = cur.m_lo + 1; m <= cur.m_hi; ++m) {
          if (cur.at(n, m) != cur.at(n, cur.m_lo)) {
            report.verdict = DescentReport::Verdict::kRefuted;
            report.reason = "period one forces constant columns, but column " +
                            std::to_string(n) + " is not constant";
            return report;
          }
        }
      }
      report.verdict = DescentReport::Verdict::kWindowExhausted;
      report.reason = "period one is consistent with the visible window";
      return report;
    }
    if (period % q != 0) {
      report.verdict = DescentReport::Verdict::kRefuted;
      report.reason = "normal form forces the vertical period " +
                      std::to_string(period) + " to be divisible by q";
      return report;
    }
    if (cur.height() < q) {
      report.verdict = DescentReport::Verdict::kWindowExhausted;
      report.reason = "window too short to compress";
      return report;
    }

    DescentStep step;
    step.claimed_period = period;
    step.height = cur.height();
    step.d = d;

    SudokuWindow next = tetris(cur);
    period /= q;

    if (const auto direct = normal_form_d(next)) {
      d = *direct;
      report.trace.push_back(step);
      cur = std::move(next);
      continue;
    }

    // The compressed window is not yet normal: refit a pseudo-affine on
    // the first clean 8x8 square and renormalize.
    std::optional<PseudoAffine> psi;
    std::vector<std::vector<long long>> square(8, std::vector<long long>(8));
    for (long long m0 = next.m_lo; m0 + 7 <= next.m_hi && !psi; ++m0) {
      for (long long c0 = 1; c0 + 7 <= n_count; ++c0) {
        for (long long v = 0; v < 8; ++v) {
          for (long long u = 0; u < 8; ++u) {
            square[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] =
                next.at(c0 + u, m0 + v);
          }
        }
        try {
          psi = fit_pseudo_affine(square, c0, m0, q);
          break;
        } catch (const std::invalid_argument&) {
        } catch (const std::runtime_error&) {
        }
      }
    }
    report.trace.push_back(step);
    if (!psi) {
      report.verdict = DescentReport::Verdict::kWindowExhausted;
      report.reason = "no clean square found after compression";
      return report;
    }
    if (mod_pos(psi->b, 2) != 1) {
      report.verdict = DescentReport::Verdict::kWindowExhausted;
      report.reason = "fitted vertical coefficient is even";
      return report;
    }
    try {
      const NormalShear shear = to_normal_form(next, *psi);
      DescentStep& recorded = report.trace.back();
      recorded.shear_a = shear.a;
      recorded.shear_b = shear.b;
      recorded.shear_c = shear.c;
      next = shear_window(next, shear.a, shear.b, shear.c);
      d = shear.d;
    } catch (const std::exception& e) {
      report.verdict = DescentReport::Verdict::kWindowExhausted;
      report.reason = std::string("renormalization failed: ") + e.what();
      return report;
    }
    cur = std::move(next);
  }
}

}  // namespace forge
