#include "forge/sudoku.hpp"

#include <stdexcept>
#include <utility>

namespace forge {

namespace {

long long mod_pos(long long x, long long q) {
  long long r = x % q;
  return r < 0 ? r + q : r;
}

int nu2(long long x) {
  int v = 0;
  while (x % 2 == 0) {
    x /= 2;
    ++v;
  }
  return v;
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

/** Smallest positive integer congruent to req mod req_mod. */
long long lift_residue(long long req, long long req_mod) {
  if (req_mod <= 1) {
    return 1;
  }
  return req == 0 ? req_mod : req;
}

bool witness_matches(long long q, const std::vector<int>& h, long long t_start,
                     long long a, long long b) {
  for (std::size_t k = 0; k < h.size(); ++k) {
    const long long t = t_start + static_cast<long long>(k);
    if (f_q(q, a * t + b) != h[k]) {
      return false;
    }
  }
  return true;
}

/**
 * Decides whether h(t) = f_q(a t + b) for t = t_start..t_start+|h|-1 has a
 * solution with a congruent to req mod req_mod (req_mod = 1: no constraint).
 * Every returned witness is re-verified by direct evaluation.
 *
 * The search follows the structure of the class: either the affine part
 * a t + b never vanishes mod q on the range (so h itself is affine and
 * nonvanishing), or it vanishes exactly on a coset t = r mod 2^{s0-o},
 * where o is the 2-adic valuation of the step; off the coset h is affine,
 * and on it h is a shorter sequence of the same class whose step residue
 * is determined, which the procedure decides recursively.
 */
std::optional<std::pair<long long, long long>> fit_fq(
    const BoardParams& params, const std::vector<int>& h, long long t_start,
    long long req, long long req_mod) {
  const long long q = params.q();
  const long long len = static_cast<long long>(h.size());
  if (len == 0) {
    return std::make_pair(lift_residue(req, req_mod), 0LL);
  }
  if (len == 1) {
    const long long a = lift_residue(req, req_mod);
    const long long b = h[0] - a * t_start;
    if (witness_matches(q, h, t_start, a, b)) {
      return std::make_pair(a, b);
    }
    return std::nullopt;
  }

  // Candidate with empty bad set: h is affine mod q and never zero.
  {
    const long long s = mod_pos(static_cast<long long>(h[1]) - h[0], q);
    if (req_mod <= 1 || mod_pos(s - req, req_mod) == 0) {
      const long long b0 = mod_pos(h[0] - s * t_start, q);
      bool ok = true;
      for (long long t = t_start; t < t_start + len; ++t) {
        if (mod_pos(s * t + b0, q) != h[static_cast<std::size_t>(t - t_start)]) {
          ok = false;
          break;
        }
      }
      if (ok && witness_matches(q, h, t_start, s, b0)) {
        return std::make_pair(s, b0);
      }
    }
  }

  // Candidates with bad coset t = r mod 2^{s0-o}.
  std::vector<char> is_bad(static_cast<std::size_t>(len));
  for (int o = 0; o < params.s0; ++o) {
    const long long mu = q >> o;
    for (long long r = 0; r < mu; ++r) {
      std::vector<long long> bad;
      for (long long t = t_start; t < t_start + len; ++t) {
        const bool hit = mod_pos(t - r, mu) == 0;
        is_bad[static_cast<std::size_t>(t - t_start)] = hit ? 1 : 0;
        if (hit) {
          bad.push_back(t);
        }
      }
      if (bad.empty() || static_cast<long long>(bad.size()) == len) {
        continue;  // the empty-coset candidate already covers the former
      }

      // The step: forced to q/2 when the coset has modulus two, read off
      // a consecutive pair outside the coset when one exists, and
      // enumerated otherwise (possible only for very short ranges).
      std::vector<long long> steps;
      if (mu == 2) {
        steps.push_back(q / 2);
      } else {
        long long paired = -1;
        for (long long t = t_start; t + 1 < t_start + len; ++t) {
          if (!is_bad[static_cast<std::size_t>(t - t_start)] &&
              !is_bad[static_cast<std::size_t>(t + 1 - t_start)]) {
            paired = t;
            break;
          }
        }
        if (paired >= 0) {
          steps.push_back(mod_pos(
              static_cast<long long>(h[static_cast<std::size_t>(paired + 1 - t_start)]) -
                  h[static_cast<std::size_t>(paired - t_start)],
              q));
        } else {
          for (long long odd = 1; odd < mu; odd += 2) {
            steps.push_back(mod_pos(odd << o, q));
          }
        }
      }

      for (long long s : steps) {
        if (s == 0 || nu2(s) != o) {
          continue;
        }
        if (req_mod > 1 && mod_pos(s - req, req_mod) != 0) {
          continue;
        }
        long long t_ref = -1;
        for (long long t = t_start; t < t_start + len; ++t) {
          if (!is_bad[static_cast<std::size_t>(t - t_start)]) {
            t_ref = t;
            break;
          }
        }
        const long long b0 =
            mod_pos(h[static_cast<std::size_t>(t_ref - t_start)] - s * t_ref, q);
        bool ok = true;
        for (long long t = t_start; t < t_start + len; ++t) {
          const long long alpha = mod_pos(s * t + b0, q);
          if (is_bad[static_cast<std::size_t>(t - t_start)]) {
            if (alpha != 0) {
              ok = false;
              break;
            }
          } else if (alpha == 0 ||
                     alpha != h[static_cast<std::size_t>(t - t_start)]) {
            ok = false;
            break;
          }
        }
        if (!ok) {
          continue;
        }

        // On the coset, a t + b = q (a' k + b') over the 0-indexed coset
        // position k, with a' odd and known mod 2^{s0-o}; recurse.
        std::vector<int> sub;
        sub.reserve(bad.size());
        for (long long t : bad) {
          sub.push_back(h[static_cast<std::size_t>(t - t_start)]);
        }
        const long long sigma = mod_pos(s >> o, mu);
        const auto rec = fit_fq(params, sub, 0, sigma, mu);
        if (!rec) {
          continue;
        }
        const long long a = rec->first << o;
        const long long b = q * rec->second - a * bad.front();
        if (witness_matches(q, h, t_start, a, b)) {
          return std::make_pair(a, b);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<LineStats> analyze_sequence(const BoardParams& params,
                                          const std::vector<int>& g) {
  if (params.s0 < 2 || params.s0 > 15) {
    throw std::invalid_argument("BoardParams: s0 must lie in [2, 15]");
  }
  const long long q = params.q();
  const long long n_count = params.board_n();
  if (static_cast<long long>(g.size()) != n_count) {
    throw std::invalid_argument(
        "analyze_sequence: sequence length must equal the board width");
  }
  for (int v : g) {
    if (v < 1 || v >= q) {
      throw std::invalid_argument(
          "analyze_sequence: values must be nonzero digits");
    }
  }

  for (long long c = 1; c < q; c += 2) {
    const long long c_inv = odd_inverse(c, q);
    std::vector<int> unscaled(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      unscaled[k] = static_cast<int>(mod_pos(c_inv * g[k], q));
    }
    const auto fit = fit_fq(params, unscaled, 1, 0, 1);
    if (!fit) {
      continue;
    }
    // Absorb the odd scale into the witness: c f_q(a n + b) equals
    // f_q(c a n + c b) as long as the argument never hits zero exactly,
    // which the direct verification below confirms.  The resulting
    // statistics (step, slope, intercept) are intrinsic to g.
    const long long a = c * fit->first;
    const long long b = c * fit->second;
    bool verified = true;
    for (long long n = 1; n <= n_count; ++n) {
      if (mod_pos(f_q(q, a * n + b), q) !=
          g[static_cast<std::size_t>(n - 1)]) {
        verified = false;
        break;
      }
    }
    if (!verified) {
      continue;
    }

    LineStats stats;
    stats.witness_a = a;
    stats.witness_b = b;
    stats.witness_c = 1;
    stats.step = mod_pos(a, q);
    stats.slope = stats.step;
    stats.intercept = mod_pos(b, q);
    // The bad coset solves a n + b = 0 mod q.
    if (stats.step != 0) {
      const int o = nu2(stats.step);
      const long long low = 1LL << o;
      if (stats.intercept % low == 0) {
        const long long mu = q >> o;
        const long long sigma = stats.step >> o;
        stats.order = o;
        stats.bad_coset.modulus = mu;
        stats.bad_coset.residue =
            mod_pos(-(stats.intercept / low) * odd_inverse(sigma, mu), mu);
      }
    }
    return stats;
  }
  return std::nullopt;
}

}  // namespace forge
