#include "forge/group.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace forge {

namespace {

long long floor_mod(long long a, long long n) {
  long long r = a % n;
  if (r < 0) r += n;
  return r;
}

void require_same_spec(const GroupSpec& a, const GroupSpec& b,
                       const char* op) {
  if (a != b)
    throw std::invalid_argument(std::string(op) +
                                ": elements belong to different groups (" +
                                a.to_string() + " vs " + b.to_string() + ")");
}

}  // namespace

void GroupSpec::validate() const {
  if (free_rank < 0)
    throw std::invalid_argument("GroupSpec: negative free rank");
  for (long long n : torsion_orders)
    if (n < 1)
      throw std::invalid_argument("GroupSpec: torsion order " +
                                  std::to_string(n) + " is not >= 1");
}

std::string GroupSpec::to_string() const {
  std::string out = "Z^" + std::to_string(free_rank);
  for (long long n : torsion_orders) out += " x Z/" + std::to_string(n);
  return out;
}

std::string GroupElement::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(coords[i]);
  }
  return out + ")";
}

GroupElement make_element(const GroupSpec& g, std::vector<long long> coords) {
  g.validate();
  if (static_cast<int>(coords.size()) != g.rank())
    throw std::invalid_argument(
        "make_element: expected " + std::to_string(g.rank()) +
        " coordinates for " + g.to_string() + ", got " +
        std::to_string(coords.size()));
  for (std::size_t i = 0; i < g.torsion_orders.size(); ++i) {
    auto& c = coords[g.free_rank + i];
    c = floor_mod(c, g.torsion_orders[i]);
  }
  return GroupElement{g, std::move(coords)};
}

GroupElement zero_element(const GroupSpec& g) {
  return make_element(g, std::vector<long long>(g.rank(), 0));
}

GroupElement standard_generator(const GroupSpec& g, int i) {
  if (i < 0 || i >= g.rank())
    throw std::invalid_argument("standard_generator: index out of range");
  std::vector<long long> coords(g.rank(), 0);
  coords[i] = 1;
  return make_element(g, std::move(coords));
}

GroupElement add(const GroupElement& a, const GroupElement& b) {
  require_same_spec(a.group, b.group, "add");
  std::vector<long long> coords(a.coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    coords[i] = a.coords[i] + b.coords[i];
  return make_element(a.group, std::move(coords));
}

GroupElement negate(const GroupElement& a) {
  std::vector<long long> coords(a.coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = -a.coords[i];
  return make_element(a.group, std::move(coords));
}

GroupElement scale(long long k, const GroupElement& a) {
  std::vector<long long> coords(a.coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = k * a.coords[i];
  return make_element(a.group, std::move(coords));
}

void PeriodLattice::validate() const {
  group.validate();
  for (const auto& g : generators)
    require_same_spec(g.group, group, "PeriodLattice");
}

long long Window::cell_count() const {
  long long total = 1;
  for (std::size_t i = 0; i < bounds.size(); ++i) total *= extent(i);
  return total;
}

Quotient::Quotient(GroupSpec group, const PeriodLattice& lattice)
    : group_(std::move(group)) {
  group_.validate();
  lattice.validate();
  if (lattice.group != group_)
    throw std::invalid_argument("Quotient: lattice group " +
                                lattice.group.to_string() +
                                " does not match " + group_.to_string());
  const int n = group_.rank();
  // Columns: lattice generators lifted to Z^n, then the torsion relations
  // n_i * e_{free_rank + i}.
  std::vector<std::vector<Bigint>> cols;
  for (const auto& g : lattice.generators) {
    std::vector<Bigint> col(n);
    for (int i = 0; i < n; ++i) col[i] = Bigint(g.coords[i]);
    cols.push_back(std::move(col));
  }
  for (std::size_t t = 0; t < group_.torsion_orders.size(); ++t) {
    std::vector<Bigint> col(n);
    col[group_.free_rank + t] = Bigint(group_.torsion_orders[t]);
    cols.push_back(std::move(col));
  }

  // Column-style Hermite normal form, processed row by row.  After row i
  // is handled, column i is the unique column with a nonzero entry in row
  // i among columns >= i, giving a lower-triangular shape.
  const int m = static_cast<int>(cols.size());
  int placed = 0;
  for (int row = 0; row < n; ++row) {
    // Gcd-out all nonzero entries of this row across columns >= placed.
    while (true) {
      int pivot = -1;
      for (int j = placed; j < m; ++j) {
        if (!cols[j][row].is_zero() &&
            (pivot == -1 ||
             cols[j][row].abs() < cols[pivot][row].abs()))
          pivot = j;
      }
      if (pivot == -1) break;
      bool others = false;
      for (int j = placed; j < m; ++j) {
        if (j == pivot || cols[j][row].is_zero()) continue;
        others = true;
        Bigint q = cols[j][row] / cols[pivot][row];  // floor division
        for (int i = 0; i < n; ++i)
          cols[j][i] = cols[j][i] - q * cols[pivot][i];
      }
      if (!others) {
        std::swap(cols[pivot], cols[placed]);
        break;
      }
    }
    if (placed >= m || cols[placed][row].is_zero())
      throw std::domain_error("index not finite: " + group_.to_string() +
                              " modulo the given lattice");
    if (cols[placed][row].is_negative())
      for (int i = 0; i < n; ++i) cols[placed][i] = -cols[placed][i];
    ++placed;
  }

  // Reduce off-diagonal entries: for each row i, entries of earlier
  // columns j < i are brought into [0, h_ii).
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (cols[j][i].is_zero()) continue;
      Bigint q = cols[j][i] / cols[i][i];
      if (q.is_zero()) continue;
      for (int k = 0; k < n; ++k) cols[j][k] = cols[j][k] - q * cols[i][k];
    }
  }

  cols.resize(n);
  cols_ = std::move(cols);
  diag_.resize(n);
  Bigint total(1);
  for (int i = 0; i < n; ++i) {
    diag_[i] = cols_[i][i].to_int64();
    total = total * cols_[i][i];
  }
  if (!total.fits_int64())
    throw std::overflow_error("Quotient: index " + total.to_string() +
                              " is too large to enumerate");
  size_ = total.to_int64();
  strides_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * diag_[i + 1];
}

GroupElement Quotient::reduce(const GroupElement& x) const {
  require_same_spec(x.group, group_, "Quotient::reduce");
  const int n = group_.rank();
  std::vector<Bigint> v(n);
  for (int i = 0; i < n; ++i) v[i] = Bigint(x.coords[i]);
  for (int i = 0; i < n; ++i) {
    Bigint q = v[i] / cols_[i][i];  // floor: canonical coord lands in [0,h_ii)
    if (!q.is_zero())
      for (int k = i; k < n; ++k) v[k] = v[k] - q * cols_[i][k];
  }
  std::vector<long long> coords(n);
  for (int i = 0; i < n; ++i) coords[i] = v[i].to_int64();
  return GroupElement{group_, std::move(coords)};
}

long long Quotient::index_of(const GroupElement& x) const {
  GroupElement r = reduce(x);
  long long idx = 0;
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    idx += r.coords[i] * strides_[i];
  return idx;
}

GroupElement Quotient::representative(long long index) const {
  if (index < 0 || index >= size_)
    throw std::invalid_argument("Quotient::representative: index out of range");
  const int n = group_.rank();
  std::vector<long long> coords(n);
  for (int i = 0; i < n; ++i) {
    coords[i] = index / strides_[i];
    index %= strides_[i];
  }
  return GroupElement{group_, std::move(coords)};
}

std::vector<GroupElement> enumerate_quotient(const GroupSpec& g,
                                             const PeriodLattice& lattice) {
  Quotient q(g, lattice);
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(q.size()));
  for (long long i = 0; i < q.size(); ++i) out.push_back(q.representative(i));
  return out;
}

long long WindowFunc::value_at(const std::vector<long long>& coords) const {
  long long idx = 0;
  for (int i = 0; i < group.free_rank; ++i) {
    idx = idx * window.extent(i) + (coords[i] - window.bounds[i][0]);
  }
  for (std::size_t t = 0; t < group.torsion_orders.size(); ++t) {
    idx = idx * group.torsion_orders[t] + coords[group.free_rank + t];
  }
  return values[static_cast<std::size_t>(idx)];
}

bool WindowFunc::contains(const std::vector<long long>& coords) const {
  for (int i = 0; i < group.free_rank; ++i)
    if (coords[i] < window.bounds[i][0] || coords[i] > window.bounds[i][1])
      return false;
  return true;
}

namespace {

/** Iterates all coordinate tuples of a window box plus torsion ranges. */
class CellIterator {
 public:
  explicit CellIterator(const WindowFunc& f) : f_(f) {
    coords_.resize(f.group.rank());
    for (int i = 0; i < f.group.free_rank; ++i)
      coords_[i] = f.window.bounds[i][0];
    done_ = false;
    for (int i = 0; i < f_.group.free_rank; ++i)
      if (f_.window.extent(i) <= 0) done_ = true;
  }
  bool done() const { return done_; }
  const std::vector<long long>& coords() const { return coords_; }
  void next() {
    for (int i = f_.group.rank() - 1; i >= 0; --i) {
      ++coords_[i];
      long long hi = i < f_.group.free_rank
                         ? f_.window.bounds[i][1]
                         : f_.group.torsion_orders[i - f_.group.free_rank] - 1;
      long long lo = i < f_.group.free_rank ? f_.window.bounds[i][0] : 0;
      if (coords_[i] <= hi) return;
      coords_[i] = lo;
    }
    done_ = true;
  }

 private:
  const WindowFunc& f_;
  std::vector<long long> coords_;
  bool done_ = true;
};

bool lexicographically_positive(const std::vector<long long>& v) {
  for (long long c : v) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;
}

bool is_positive_multiple(const std::vector<long long>& v,
                          const std::vector<long long>& base,
                          const GroupSpec& g) {
  // Checks v = k * base for some integer k >= 2 (torsion modulo orders).
  auto check = [&](long long k) {
    for (int i = 0; i < g.free_rank; ++i)
      if (v[i] != k * base[i]) return false;
    for (std::size_t t = 0; t < g.torsion_orders.size(); ++t) {
      long long n = g.torsion_orders[t];
      if (v[g.free_rank + t] != floor_mod(k * base[g.free_rank + t], n))
        return false;
    }
    return true;
  };
  // A nonzero free coordinate of base pins k down exactly.
  for (int i = 0; i < g.free_rank; ++i) {
    if (base[i] == 0) {
      if (v[i] != 0) return false;
      continue;
    }
    if (v[i] % base[i] != 0) return false;
    long long k = v[i] / base[i];
    return k >= 2 && check(k);
  }
  // Pure torsion direction: k only matters modulo lcm of the orders.
  long long cap = 1;
  for (long long n : g.torsion_orders) {
    cap = std::lcm(cap, n);
    if (cap > 1000000) break;
  }
  for (long long k = 2; k <= cap; ++k)
    if (check(k)) return true;
  return false;
}

}  // namespace

std::vector<PeriodLattice> detect_periods(const WindowFunc& f,
                                          long long max_index) {
  f.group.validate();
  if (max_index < 1)
    throw std::invalid_argument("detect_periods: max_index must be >= 1");
  if (static_cast<int>(f.window.bounds.size()) != f.group.free_rank)
    throw std::invalid_argument(
        "detect_periods: window rank does not match free rank");
  for (int i = 0; i < f.group.free_rank; ++i)
    if (f.window.extent(i) < 2 * max_index + 1)
      throw std::invalid_argument(
          "window too small for requested max_index (extent " +
          std::to_string(f.window.extent(i)) + " < " +
          std::to_string(2 * max_index + 1) + ")");

  // Enumerate candidate shifts: free coordinates in [-max_index, max_index],
  // torsion coordinates over their full range.
  std::vector<long long> lo(f.group.rank()), hi(f.group.rank());
  for (int i = 0; i < f.group.free_rank; ++i) {
    lo[i] = -max_index;
    hi[i] = max_index;
  }
  for (std::size_t t = 0; t < f.group.torsion_orders.size(); ++t) {
    lo[f.group.free_rank + t] = 0;
    hi[f.group.free_rank + t] = f.group.torsion_orders[t] - 1;
  }

  std::vector<std::vector<long long>> detected;
  std::vector<long long> v = lo;
  bool exhausted = false;
  while (!exhausted) {
    bool zero = std::all_of(v.begin(), v.end(),
                            [](long long c) { return c == 0; });
    if (!zero) {
      std::vector<long long> canon = v;
      if (!lexicographically_positive(canon)) {
        // Use the lexicographically positive representative of {v, -v}.
        for (int i = 0; i < f.group.free_rank; ++i) canon[i] = -canon[i];
        for (std::size_t t = 0; t < f.group.torsion_orders.size(); ++t) {
          long long n = f.group.torsion_orders[t];
          canon[f.group.free_rank + t] =
              floor_mod(-canon[f.group.free_rank + t], n);
        }
      }
      bool seen = std::find(detected.begin(), detected.end(), canon) !=
                  detected.end();
      if (!seen) {
        bool matches = true;
        for (CellIterator it(f); !it.done() && matches; it.next()) {
          std::vector<long long> shifted = it.coords();
          for (int i = 0; i < f.group.free_rank; ++i) shifted[i] += canon[i];
          for (std::size_t t = 0; t < f.group.torsion_orders.size(); ++t) {
            long long n = f.group.torsion_orders[t];
            shifted[f.group.free_rank + t] = floor_mod(
                shifted[f.group.free_rank + t] + canon[f.group.free_rank + t],
                n);
          }
          if (!f.contains(shifted)) continue;
          if (f.value_at(shifted) != f.value_at(it.coords())) matches = false;
        }
        if (matches) detected.push_back(canon);
      }
    }
    // Advance.
    exhausted = true;
    for (int i = f.group.rank() - 1; i >= 0; --i) {
      if (v[i] < hi[i]) {
        ++v[i];
        for (int j = i + 1; j < f.group.rank(); ++j) v[j] = lo[j];
        exhausted = false;
        break;
      }
    }
  }

  // Keep primitive directions only: drop vectors that are positive
  // multiples of another detected vector.
  std::sort(detected.begin(), detected.end(),
            [](const auto& a, const auto& b) {
              auto norm = [](const std::vector<long long>& x) {
                long long s = 0;
                for (long long c : x) s += std::abs(c);
                return s;
              };
              long long na = norm(a), nb = norm(b);
              if (na != nb) return na < nb;
              return a < b;
            });
  std::vector<std::vector<long long>> primitive;
  for (const auto& cand : detected) {
    bool multiple = false;
    for (const auto& base : primitive)
      if (is_positive_multiple(cand, base, f.group)) {
        multiple = true;
        break;
      }
    if (!multiple) primitive.push_back(cand);
  }

  std::vector<PeriodLattice> out;
  for (const auto& cand : primitive) {
    PeriodLattice lat;
    lat.group = f.group;
    lat.generators.push_back(make_element(f.group, cand));
    out.push_back(std::move(lat));
  }
  return out;
}

}  // namespace forge
