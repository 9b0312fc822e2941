#include "forge/boxes.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace forge {

namespace {

void check_region(const BoxRegion& region, const char* who) {
  if (region.dimension < 1)
    throw std::invalid_argument(std::string(who) + ": dimension must be >= 1");
  for (const auto& box : region.boxes)
    if (static_cast<int>(box.bounds.size()) != region.dimension)
      throw std::invalid_argument(std::string(who) +
                                  ": box dimension mismatch");
}

long long floor_int(const Rational& r) { return r.floor().to_int64(); }

long long ceil_int(const Rational& r) { return -((-r).floor().to_int64()); }

}  // namespace

BoxRegion build_rigid_tile_boxes(int dimension, const Rational& eps,
                       const std::vector<Rational>& corners) {
  if (dimension < 1)
    throw std::invalid_argument("build_rigid_tile_boxes: dimension must be >= 1");
  if (static_cast<int>(corners.size()) != dimension)
    throw std::invalid_argument("build_rigid_tile_boxes: need one corner per axis");
  const Rational zero = 0, one = 1, fifth(1, 5);
  if (!(zero < eps)) throw std::invalid_argument("0 < eps violated");
  if (!(eps < fifth)) throw std::invalid_argument("eps < 1/5 violated");
  const Rational two_eps = eps + eps;
  const Rational upper = one - (eps + eps + eps);
  for (int j = 0; j < dimension; ++j) {
    if (!(two_eps < corners[static_cast<std::size_t>(j)]))
      throw std::invalid_argument("2*eps < x_j violated (j=" +
                                  std::to_string(j) + ")");
    if (!(corners[static_cast<std::size_t>(j)] < upper))
      throw std::invalid_argument("x_j < 1 - 3*eps violated (j=" +
                                  std::to_string(j) + ")");
  }

  BoxRegion region;
  region.dimension = dimension;
  SignedBox cube;
  cube.bounds.assign(static_cast<std::size_t>(dimension), {zero, one});
  region.boxes.push_back(cube);
  for (int k = 0; k < dimension; ++k) {
    SignedBox notch;
    for (int j = 0; j < dimension; ++j) {
      if (j == k)
        notch.bounds.push_back({zero, eps});
      else
        notch.bounds.push_back({corners[static_cast<std::size_t>(j)],
                                corners[static_cast<std::size_t>(j)] + eps});
    }
    notch.sign = -1;
    notch.pair_id = k;
    region.boxes.push_back(notch);

    SignedBox lid = notch;
    lid.sign = 1;
    lid.bounds[static_cast<std::size_t>(k)] = {one, one + eps};
    region.boxes.push_back(lid);
  }
  return region;
}

Rational region_volume(const BoxRegion& region) {
  check_region(region, "region_volume");
  Rational total = 0;
  for (const auto& box : region.boxes) {
    Rational vol = box.sign;
    for (const auto& b : box.bounds) {
      if (!(b[0] < b[1])) {
        vol = 0;
        break;
      }
      vol = vol * (b[1] - b[0]);
    }
    total = total + vol;
  }
  return total;
}

BoxRegion translate_region(const BoxRegion& region,
                           const std::vector<Rational>& shift) {
  check_region(region, "translate_region");
  if (static_cast<int>(shift.size()) != region.dimension)
    throw std::invalid_argument("translate_region: shift dimension mismatch");
  BoxRegion out = region;
  for (auto& box : out.boxes)
    for (int j = 0; j < region.dimension; ++j) {
      auto& b = box.bounds[static_cast<std::size_t>(j)];
      b[0] = b[0] + shift[static_cast<std::size_t>(j)];
      b[1] = b[1] + shift[static_cast<std::size_t>(j)];
    }
  return out;
}

long long indicator_at(const std::vector<SignedBox>& boxes,
                       const std::vector<Rational>& point) {
  long long net = 0;
  for (const auto& box : boxes) {
    if (box.bounds.size() != point.size())
      throw std::invalid_argument("indicator_at: dimension mismatch");
    bool inside = true;
    for (std::size_t j = 0; j < point.size() && inside; ++j)
      inside = !(point[j] < box.bounds[j][0]) && point[j] < box.bounds[j][1];
    if (inside) net += box.sign;
  }
  return net;
}

SweepReport sweep_indicator(
    const std::vector<SignedBox>& boxes,
    const std::vector<std::array<Rational, 2>>& window) {
  const int d = static_cast<int>(window.size());
  if (d < 1)
    throw std::invalid_argument("sweep_indicator: window must be nonempty");
  for (const auto& w : window)
    if (!(w[0] < w[1]))
      throw std::invalid_argument("sweep_indicator: window must have lo < hi");
  for (const auto& box : boxes)
    if (static_cast<int>(box.bounds.size()) != d)
      throw std::invalid_argument("sweep_indicator: box dimension mismatch");

  // Collect per-axis breakpoints: window edges plus every box edge that
  // falls strictly inside the window.
  std::vector<std::vector<Rational>> cuts(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto& c = cuts[static_cast<std::size_t>(a)];
    c.push_back(window[static_cast<std::size_t>(a)][0]);
    c.push_back(window[static_cast<std::size_t>(a)][1]);
    for (const auto& box : boxes)
      for (const Rational& v : box.bounds[static_cast<std::size_t>(a)])
        if (window[static_cast<std::size_t>(a)][0] < v &&
            v < window[static_cast<std::size_t>(a)][1])
          c.push_back(v);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  std::vector<long long> cells(static_cast<std::size_t>(d));
  long long total_cells = 1;
  for (int a = 0; a < d; ++a) {
    cells[static_cast<std::size_t>(a)] =
        static_cast<long long>(cuts[static_cast<std::size_t>(a)].size()) - 1;
    total_cells *= cells[static_cast<std::size_t>(a)];
    if (total_cells > (1LL << 24))
      throw std::length_error(
          "sweep_indicator: compressed grid exceeds 2^24 cells");
  }

  // Difference array padded by one fence slice per axis.
  std::vector<long long> padded(static_cast<std::size_t>(d));
  long long padded_total = 1;
  for (int a = 0; a < d; ++a) {
    padded[static_cast<std::size_t>(a)] = cells[static_cast<std::size_t>(a)] + 1;
    padded_total *= padded[static_cast<std::size_t>(a)];
  }
  std::vector<long long> stride(static_cast<std::size_t>(d), 1);
  for (int a = d - 2; a >= 0; --a)
    stride[static_cast<std::size_t>(a)] =
        stride[static_cast<std::size_t>(a + 1)] *
        padded[static_cast<std::size_t>(a + 1)];
  std::vector<long long> diff(static_cast<std::size_t>(padded_total), 0);

  std::vector<long long> lo_idx(static_cast<std::size_t>(d));
  std::vector<long long> hi_idx(static_cast<std::size_t>(d));
  for (const auto& box : boxes) {
    bool hit = true;
    for (int a = 0; a < d && hit; ++a) {
      const auto& c = cuts[static_cast<std::size_t>(a)];
      Rational lo = std::max(box.bounds[static_cast<std::size_t>(a)][0],
                             window[static_cast<std::size_t>(a)][0]);
      Rational hi = std::min(box.bounds[static_cast<std::size_t>(a)][1],
                             window[static_cast<std::size_t>(a)][1]);
      if (!(lo < hi)) {
        hit = false;
        break;
      }
      lo_idx[static_cast<std::size_t>(a)] =
          std::lower_bound(c.begin(), c.end(), lo) - c.begin();
      hi_idx[static_cast<std::size_t>(a)] =
          std::lower_bound(c.begin(), c.end(), hi) - c.begin();
    }
    if (!hit) continue;
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      long long lin = 0;
      int parity = 0;
      for (int a = 0; a < d; ++a) {
        bool high = (corner >> a) & 1u;
        parity += high ? 1 : 0;
        lin += (high ? hi_idx[static_cast<std::size_t>(a)]
                     : lo_idx[static_cast<std::size_t>(a)]) *
               stride[static_cast<std::size_t>(a)];
      }
      diff[static_cast<std::size_t>(lin)] +=
          (parity % 2 == 0) ? box.sign : -box.sign;
    }
  }

  for (int a = 0; a < d; ++a) {
    const long long s = stride[static_cast<std::size_t>(a)];
    const long long extent = padded[static_cast<std::size_t>(a)];
    for (long long lin = 0; lin < padded_total; ++lin)
      if ((lin / s) % extent > 0)
        diff[static_cast<std::size_t>(lin)] +=
            diff[static_cast<std::size_t>(lin - s)];
  }

  SweepReport report;
  report.cells_checked = total_cells;
  std::vector<long long> odo(static_cast<std::size_t>(d), 0);
  for (long long count = 0; count < total_cells; ++count) {
    long long lin = 0;
    for (int a = 0; a < d; ++a)
      lin += odo[static_cast<std::size_t>(a)] * stride[static_cast<std::size_t>(a)];
    long long v = diff[static_cast<std::size_t>(lin)];
    if (v < 0)
      ++report.cells_negative;
    else if (v == 0)
      ++report.cells_zero;
    else if (v == 1)
      ++report.cells_one;
    else
      ++report.cells_multiple;
    if (v != 1 && report.witness.empty())
      for (int a = 0; a < d; ++a)
        report.witness.push_back(
            cuts[static_cast<std::size_t>(a)]
                [static_cast<std::size_t>(odo[static_cast<std::size_t>(a)])]);
    for (int a = d - 1; a >= 0; --a) {
      if (++odo[static_cast<std::size_t>(a)] < cells[static_cast<std::size_t>(a)])
        break;
      odo[static_cast<std::size_t>(a)] = 0;
    }
  }
  report.exact = report.cells_zero == 0 && report.cells_multiple == 0 &&
                 report.cells_negative == 0;
  return report;
}

BoxRegion lift_discrete_tile(const BoxRegion& base,
                      const std::vector<std::vector<long long>>& points) {
  check_region(base, "lift_discrete_tile");
  if (points.empty())
    throw std::invalid_argument("lift_discrete_tile: empty point set");
  BoxRegion out;
  out.dimension = base.dimension;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != base.dimension)
      throw std::invalid_argument("lift_discrete_tile: point dimension mismatch");
    std::vector<Rational> shift;
    for (long long c : p) shift.push_back(Rational(c));
    BoxRegion copy = translate_region(base, shift);
    out.boxes.insert(out.boxes.end(), copy.boxes.begin(), copy.boxes.end());
  }
  if (out.boxes.empty()) return out;

  // Disjointness check: sweep the bounding window of the union and make
  // sure the net indicator never exceeds 1 (or drops below 0).
  std::vector<std::array<Rational, 2>> bbox(
      static_cast<std::size_t>(base.dimension));
  bool first = true;
  for (const auto& box : out.boxes)
    for (int a = 0; a < base.dimension; ++a) {
      const auto& b = box.bounds[static_cast<std::size_t>(a)];
      if (first) {
        bbox[static_cast<std::size_t>(a)] = b;
      } else {
        auto& w = bbox[static_cast<std::size_t>(a)];
        w[0] = std::min(w[0], b[0]);
        w[1] = std::max(w[1], b[1]);
      }
      if (a == base.dimension - 1) first = false;
    }
  SweepReport sweep = sweep_indicator(out.boxes, bbox);
  if (sweep.cells_negative > 0)
    throw std::runtime_error("lift_discrete_tile: region indicator went negative");
  if (sweep.cells_multiple > 0)
    throw std::runtime_error("lift_discrete_tile: translates overlap");
  return out;
}

namespace {

/** Exact inverse of a d x d rational matrix for d <= 3 via the adjugate. */
std::vector<std::vector<Rational>> invert_matrix(
    const std::vector<std::vector<Rational>>& m) {
  const std::size_t d = m.size();
  Rational det;
  if (d == 1) {
    det = m[0][0];
  } else if (d == 2) {
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  } else {
    det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
          m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
  if (det.is_zero())
    throw std::invalid_argument("verify_box_lattice_tiling: lattice basis is singular");
  std::vector<std::vector<Rational>> inv(d, std::vector<Rational>(d));
  if (d == 1) {
    inv[0][0] = Rational(1) / det;
  } else if (d == 2) {
    inv[0][0] = m[1][1] / det;
    inv[0][1] = (-m[0][1]) / det;
    inv[1][0] = (-m[1][0]) / det;
    inv[1][1] = m[0][0] / det;
  } else {
    auto cof = [&](std::size_t r0, std::size_t r1, std::size_t c0,
                   std::size_t c1) {
      return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    };
    inv[0][0] = cof(1, 2, 1, 2) / det;
    inv[0][1] = (-cof(0, 2, 1, 2)) / det;
    inv[0][2] = cof(0, 1, 1, 2) / det;
    inv[1][0] = (-cof(1, 2, 0, 2)) / det;
    inv[1][1] = cof(0, 2, 0, 2) / det;
    inv[1][2] = (-cof(0, 1, 0, 2)) / det;
    inv[2][0] = cof(1, 2, 0, 1) / det;
    inv[2][1] = (-cof(0, 2, 0, 1)) / det;
    inv[2][2] = cof(0, 1, 0, 1) / det;
  }
  return inv;
}

}  // namespace

SweepReport verify_box_lattice_tiling(
    const BoxRegion& region, const std::vector<std::vector<Rational>>& basis,
    const std::vector<std::array<Rational, 2>>& window) {
  check_region(region, "verify_box_lattice_tiling");
  if (region.boxes.empty())
    throw std::invalid_argument("verify_box_lattice_tiling: empty region");
  const int d = region.dimension;
  if (static_cast<int>(window.size()) != d)
    throw std::invalid_argument("verify_box_lattice_tiling: window dimension mismatch");

  std::vector<std::vector<Rational>> mat(
      static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d)));
  if (basis.empty()) {
    for (int i = 0; i < d; ++i)
      mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  } else {
    if (static_cast<int>(basis.size()) != d)
      throw std::invalid_argument(
          "verify_box_lattice_tiling: need one generator per dimension");
    if (d > 3)
      throw std::invalid_argument(
          "verify_box_lattice_tiling: exact basis inversion supported for dimension <= 3");
    for (int j = 0; j < d; ++j) {
      if (static_cast<int>(basis[static_cast<std::size_t>(j)].size()) != d)
        throw std::invalid_argument(
            "verify_box_lattice_tiling: generator dimension mismatch");
      for (int i = 0; i < d; ++i)
        mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  std::vector<std::vector<Rational>> inv = invert_matrix(mat);

  // Bounding box of the region, then the window of translation vectors v
  // with (region + v) meeting the window, mapped to coefficient bounds
  // through the exact inverse.
  std::vector<std::array<Rational, 2>> bbox(static_cast<std::size_t>(d));
  bool first = true;
  for (const auto& box : region.boxes) {
    for (int a = 0; a < d; ++a) {
      const auto& b = box.bounds[static_cast<std::size_t>(a)];
      auto& w = bbox[static_cast<std::size_t>(a)];
      if (first) {
        w = b;
      } else {
        w[0] = std::min(w[0], b[0]);
        w[1] = std::max(w[1], b[1]);
      }
    }
    first = false;
  }
  std::vector<std::array<Rational, 2>> vrange(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    vrange[static_cast<std::size_t>(a)] = {
        window[static_cast<std::size_t>(a)][0] - bbox[static_cast<std::size_t>(a)][1],
        window[static_cast<std::size_t>(a)][1] - bbox[static_cast<std::size_t>(a)][0]};

  std::vector<long long> kmin(static_cast<std::size_t>(d), 0);
  std::vector<long long> kmax(static_cast<std::size_t>(d), 0);
  bool have_corner = false;
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    std::vector<Rational> y(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
      y[static_cast<std::size_t>(a)] =
          vrange[static_cast<std::size_t>(a)][(corner >> a) & 1u];
    for (int i = 0; i < d; ++i) {
      Rational k = 0;
      for (int j = 0; j < d; ++j)
        k = k + inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    y[static_cast<std::size_t>(j)];
      long long lo = floor_int(k) - 1;
      long long hi = ceil_int(k) + 1;
      if (!have_corner) {
        kmin[static_cast<std::size_t>(i)] = lo;
        kmax[static_cast<std::size_t>(i)] = hi;
      } else {
        kmin[static_cast<std::size_t>(i)] =
            std::min(kmin[static_cast<std::size_t>(i)], lo);
        kmax[static_cast<std::size_t>(i)] =
            std::max(kmax[static_cast<std::size_t>(i)], hi);
      }
    }
    have_corner = true;
  }

  long long combos = 1;
  for (int i = 0; i < d; ++i) {
    combos *= kmax[static_cast<std::size_t>(i)] - kmin[static_cast<std::size_t>(i)] + 1;
    if (combos > (1LL << 20))
      throw std::length_error(
          "verify_box_lattice_tiling: too many candidate translates");
  }

  std::vector<SignedBox> all;
  std::vector<long long> k(static_cast<std::size_t>(d));
  for (long long c = 0; c < combos; ++c) {
    long long rem = c;
    for (int i = d - 1; i >= 0; --i) {
      long long span =
          kmax[static_cast<std::size_t>(i)] - kmin[static_cast<std::size_t>(i)] + 1;
      k[static_cast<std::size_t>(i)] = kmin[static_cast<std::size_t>(i)] + rem % span;
      rem /= span;
    }
    std::vector<Rational> v(static_cast<std::size_t>(d), Rational(0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        v[static_cast<std::size_t>(i)] =
            v[static_cast<std::size_t>(i)] +
            mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                Rational(k[static_cast<std::size_t>(j)]);
    for (const auto& box : region.boxes) {
      SignedBox moved = box;
      bool meets = true;
      for (int a = 0; a < d; ++a) {
        auto& b = moved.bounds[static_cast<std::size_t>(a)];
        b[0] = b[0] + v[static_cast<std::size_t>(a)];
        b[1] = b[1] + v[static_cast<std::size_t>(a)];
        if (!(b[0] < window[static_cast<std::size_t>(a)][1]) ||
            !(window[static_cast<std::size_t>(a)][0] < b[1]))
          meets = false;
      }
      if (meets) all.push_back(std::move(moved));
    }
  }
  return sweep_indicator(all, window);
}

}  // namespace forge
