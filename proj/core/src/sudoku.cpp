#include "forge/sudoku.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>

#include "forge/parallel.hpp"

namespace forge {

namespace {

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

void require_params(const BoardParams& params) {
  if (params.s0 < 2 || params.s0 > 15) {
    throw std::invalid_argument("BoardParams: s0 must lie in [2, 15]");
  }
}

}  // namespace

long long f_q(long long q, long long n) {
  if (q < 2) {
    throw std::invalid_argument("f_q: base must be at least two");
  }
  if (n == 0) {
    return 1;
  }
  while (n % q == 0) {
    n /= q;
  }
  return mod_pos(n, q);
}

int SudokuWindow::at(long long n, long long m) const {
  if (n < 1 || n > params.board_n() || !contains_m(m)) {
    throw std::out_of_range("SudokuWindow: cell (" + std::to_string(n) + ", " +
                            std::to_string(m) + ") is outside the window");
  }
  return rows[static_cast<std::size_t>(m - m_lo)][static_cast<std::size_t>(n - 1)];
}

SudokuWindow make_window(const BoardParams& params, long long m_lo,
                         long long m_hi,
                         const std::function<int(long long, long long)>& fill) {
  require_params(params);
  if (m_hi < m_lo) {
    throw std::invalid_argument("make_window: empty row range");
  }
  SudokuWindow w;
  w.params = params;
  w.m_lo = m_lo;
  w.m_hi = m_hi;
  const long long n_count = params.board_n();
  w.rows.assign(static_cast<std::size_t>(m_hi - m_lo + 1), {});
  for (long long m = m_lo; m <= m_hi; ++m) {
    std::vector<int>& row = w.rows[static_cast<std::size_t>(m - m_lo)];
    row.resize(static_cast<std::size_t>(n_count));
    for (long long n = 1; n <= n_count; ++n) {
      row[static_cast<std::size_t>(n - 1)] = fill(n, m);
    }
  }
  validate_window(w);
  return w;
}

void validate_window(const SudokuWindow& w) {
  require_params(w.params);
  if (w.m_hi < w.m_lo) {
    throw std::invalid_argument("SudokuWindow: empty row range");
  }
  const long long q = w.params.q();
  const std::size_t n_count = static_cast<std::size_t>(w.params.board_n());
  if (w.rows.size() != static_cast<std::size_t>(w.height())) {
    throw std::invalid_argument("SudokuWindow: row count does not match the range");
  }
  for (const std::vector<int>& row : w.rows) {
    if (row.size() != n_count) {
      throw std::invalid_argument("SudokuWindow: row width does not match the board");
    }
    for (int v : row) {
      if (v < 1 || v >= q) {
        throw std::invalid_argument("SudokuWindow: values must be nonzero digits");
      }
    }
  }
}

SudokuReport is_sudoku_solution(const SudokuWindow& w, long long max_slope) {
  validate_window(w);
  const long long n_count = w.params.board_n();
  // The line m = j n + i lies in the window iff j n + i stays within
  // [m_lo, m_hi] at both n = 1 and n = N.
  auto intercepts = [&](long long j) -> std::pair<long long, long long> {
    if (j >= 0) {
      return {w.m_lo - j, w.m_hi - j * n_count};
    }
    return {w.m_lo - j * n_count, w.m_hi - j};
  };
  long long j_max = max_slope;
  if (j_max < 0) {
    j_max = 0;
    while (true) {
      const auto up = intercepts(j_max + 1);
      const auto down = intercepts(-(j_max + 1));
      if (up.first > up.second && down.first > down.second) {
        break;
      }
      ++j_max;
    }
  }
  // Flatten the slopes into contiguous canonical line indices so the
  // scan can be chunked; the canonical order (j ascending, i ascending)
  // fixes the reported failure and count at every thread budget.
  struct SlopeRange {
    long long j, i_lo, i_hi, prefix;
  };
  std::vector<SlopeRange> ranges;
  long long total = 0;
  for (long long j = -j_max; j <= j_max; ++j) {
    const auto range = intercepts(j);
    if (range.first > range.second) continue;
    ranges.push_back({j, range.first, range.second, total});
    total += range.second - range.first + 1;
  }
  if (total == 0) {
    throw std::invalid_argument(
        "is_sudoku_solution: no line of allowed slope fits in the window");
  }

  auto scan = [&](long long lo,
                  long long hi) -> std::optional<std::pair<long long, LineRef>> {
    std::vector<int> g(static_cast<std::size_t>(n_count));
    std::size_t r = 0;
    while (r + 1 < ranges.size() && ranges[r + 1].prefix <= lo) ++r;
    for (long long k = lo; k < hi; ++k) {
      while (k - ranges[r].prefix > ranges[r].i_hi - ranges[r].i_lo) ++r;
      const long long j = ranges[r].j;
      const long long i = ranges[r].i_lo + (k - ranges[r].prefix);
      for (long long n = 1; n <= n_count; ++n) {
        g[static_cast<std::size_t>(n - 1)] = w.at(n, j * n + i);
      }
      if (!analyze_sequence(w.params, g)) {
        return std::make_pair(k, LineRef{i, j});
      }
    }
    return std::nullopt;
  };

  std::optional<std::pair<long long, LineRef>> failure;
  const long long budget = thread_budget();
  if (budget <= 1 || total < 256) {
    failure = scan(0, total);
  } else {
    const long long workers = std::min(budget, (total + 255) / 256);
    const long long chunk = (total + workers - 1) / workers;
    std::vector<std::future<std::optional<std::pair<long long, LineRef>>>>
        futures;
    for (long long wkr = 1; wkr < workers; ++wkr) {
      const long long lo = wkr * chunk;
      futures.push_back(std::async(std::launch::async, scan, lo,
                                   std::min(lo + chunk, total)));
    }
    failure = scan(0, std::min(chunk, total));
    for (auto& fut : futures) {
      auto found = fut.get();
      if (found && (!failure || found->first < failure->first)) {
        failure = found;
      }
    }
  }

  SudokuReport report;
  if (failure) {
    report.pass = false;
    report.lines_checked = failure->first + 1;
    report.first_failure = failure->second;
    report.reason = "line m = " + std::to_string(failure->second.slope) +
                    "n + " + std::to_string(failure->second.intercept) +
                    " is not of the recognized class";
  } else {
    report.pass = true;
    report.lines_checked = total;
  }
  return report;
}

std::optional<std::vector<std::vector<int>>> has_good_columns(
    const SudokuWindow& w) {
  validate_window(w);
  const long long q = w.params.q();
  if (w.height() < 2 * q) {
    throw std::invalid_argument(
        "has_good_columns: window height must be at least 2q");
  }
  const long long n_count = w.params.board_n();
  std::vector<std::vector<int>> sigmas;
  sigmas.reserve(static_cast<std::size_t>(n_count));
  // Per residue class: the constant value of the class, or -1 when the
  // class holds two different values.
  std::vector<int> cls(static_cast<std::size_t>(q));
  for (long long n = 1; n <= n_count; ++n) {
    std::fill(cls.begin(), cls.end(), 0);
    for (long long m = w.m_lo; m <= w.m_hi; ++m) {
      const std::size_t rho = static_cast<std::size_t>(mod_pos(m, q));
      const int v = w.at(n, m);
      if (cls[rho] == 0) {
        cls[rho] = v;
      } else if (cls[rho] != v) {
        cls[rho] = -1;
      }
    }
    long long forced = -1;
    bool impossible = false;
    for (long long rho = 0; rho < q; ++rho) {
      if (cls[static_cast<std::size_t>(rho)] == -1) {
        if (forced >= 0) {
          impossible = true;
          break;
        }
        forced = rho;
      }
    }
    if (impossible) {
      return std::nullopt;
    }
    std::vector<int> sigma;
    for (long long rho0 = (forced >= 0 ? forced : 0); rho0 < q; ++rho0) {
      if (forced >= 0 && rho0 != forced) {
        break;
      }
      std::vector<char> used(static_cast<std::size_t>(q), 0);
      std::vector<int> cand(static_cast<std::size_t>(q), 0);
      bool ok = true;
      for (long long rho = 0; rho < q; ++rho) {
        if (rho == rho0) {
          continue;
        }
        const int v = cls[static_cast<std::size_t>(rho)];
        if (v <= 0 || used[static_cast<std::size_t>(v)]) {
          ok = false;
          break;
        }
        used[static_cast<std::size_t>(v)] = 1;
        cand[static_cast<std::size_t>(rho)] = v;
      }
      if (ok) {
        sigma = std::move(cand);
        break;
      }
    }
    if (sigma.empty()) {
      return std::nullopt;
    }
    sigmas.push_back(std::move(sigma));
  }
  return sigmas;
}

Rational digit_density(const SudokuWindow& w, int digit) {
  validate_window(w);
  if (digit < 1 || digit >= w.params.q()) {
    throw std::invalid_argument("digit_density: digit must be nonzero mod q");
  }
  long long hits = 0;
  long long total = 0;
  for (const std::vector<int>& row : w.rows) {
    for (int v : row) {
      ++total;
      if (v == digit) {
        ++hits;
      }
    }
  }
  return Rational(Bigint(hits), Bigint(total));
}

bool check_rigid_out(const BoardParams& params, long long witness_a,
                     long long witness_b, long long witness_c,
                     long long alpha_slope, long long alpha_intercept,
                     long long start) {
  require_params(params);
  const long long q = params.q();
  if (mod_pos(witness_c, 2) != 1) {
    throw std::invalid_argument("check_rigid_out: witness scale must be odd");
  }
  const long long n_count = params.board_n();
  if (start < 1 || start + 7 > n_count) {
    throw std::invalid_argument(
        "check_rigid_out: the 8-point interval must lie inside the board");
  }
  auto agrees_at = [&](long long n) {
    const long long alpha = mod_pos(alpha_slope * n + alpha_intercept, q);
    if (alpha == 0) {
      return true;
    }
    const long long g =
        mod_pos(witness_c * f_q(q, witness_a * n + witness_b), q);
    return g == alpha;
  };
  bool hypothesis = true;
  for (long long n = start; n < start + 8; ++n) {
    if (!agrees_at(n)) {
      hypothesis = false;
      break;
    }
  }
  if (!hypothesis) {
    return true;
  }
  for (long long n = 1; n <= n_count; ++n) {
    if (!agrees_at(n)) {
      return false;
    }
  }
  return true;
}

}  // namespace forge
