#include "forge/functional.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "forge/bigint.hpp"

namespace forge {

namespace {

constexpr long long kMaterializeCap = 4096;

void require_finite(const GroupSpec& g, const char* what) {
  if (!g.is_finite()) {
    throw std::domain_error(std::string(what) + ": finite group required");
  }
}

Bigint big_order(const GroupSpec& g) {
  Bigint n(1);
  for (long long t : g.torsion_orders) n = n * Bigint(t);
  return n;
}

/** Common coordinate order required by kernel set expressions. */
long long kernel_modulus(const GroupSpec& codomain) {
  if (codomain.torsion_orders.empty()) {
    throw std::invalid_argument("kernel set: codomain has no coordinates");
  }
  long long n = codomain.torsion_orders.front();
  for (long long t : codomain.torsion_orders) {
    if (t != n) {
      throw std::invalid_argument(
          "kernel set: all codomain coordinate orders must be equal");
    }
  }
  return n;
}

long long mod_reduce(long long v, long long n) {
  long long r = v % n;
  if (r < 0) r += n;
  return r;
}

/** Rows reduced mod n, sorted, with duplicates removed. */
std::vector<std::vector<long long>> canonical_rows(
    const std::vector<std::vector<long long>>& rows, long long n,
    std::size_t width) {
  std::vector<std::vector<long long>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != width) {
      throw std::invalid_argument("kernel set: row width mismatch");
    }
    std::vector<long long> r(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) r[i] = mod_reduce(row[i], n);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool kernel_holds(const std::vector<std::vector<long long>>& rows, long long n,
                  const std::vector<long long>& tuple) {
  for (const auto& row : rows) {
    long long acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      acc = mod_reduce(acc + mod_reduce(row[i] * mod_reduce(tuple[i], n), n), n);
    }
    if (acc != 0) return false;
  }
  return true;
}

/** |kernel| of the canonical rows inside (Z/n)^width, exactly. */
Bigint kernel_cardinality(const std::vector<std::vector<long long>>& rows,
                          long long n, std::size_t width) {
  Bigint full = Bigint(1);
  for (std::size_t i = 0; i < width; ++i) full = full * Bigint(n);
  if (rows.empty()) return full;
  // The image of the coefficient map (Z/n)^width -> (Z/n)^rows is generated
  // by the columns; |kernel| = n^width / |image| and |image| follows from
  // the quotient of (Z/n)^rows by the column span.
  const int r = static_cast<int>(rows.size());
  GroupSpec target{0, std::vector<long long>(rows.size(), n)};
  PeriodLattice span{target, {}};
  for (std::size_t t = 0; t < width; ++t) {
    std::vector<long long> col(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][t];
    span.generators.push_back(make_element(target, std::move(col)));
  }
  Quotient q(target, span);
  Bigint nr(1);
  for (int i = 0; i < r; ++i) nr = nr * Bigint(n);
  // |image| = n^r / q.size(); |kernel| = n^width * q.size() / n^r.
  Bigint quot, rem;
  Bigint::divmod_floor(full * Bigint(q.size()), nr, quot, rem);
  if (!rem.is_zero()) {
    throw std::logic_error("kernel_cardinality: inexact division");
  }
  return quot;
}

std::string set_key(const SetExpr& s) {
  std::ostringstream os;
  switch (s.kind) {
    case SetExpr::Kind::kExplicit:
      os << "E";
      for (const auto& v : s.values) {
        os << '|';
        for (long long c : v) os << c << ',';
      }
      break;
    case SetExpr::Kind::kKernel:
    case SetExpr::Kind::kKernelComplement:
      os << (s.kind == SetExpr::Kind::kKernel ? "K" : "C");
      for (const auto& r : s.kernel_rows) {
        os << '|';
        for (long long c : r) os << c << ',';
      }
      break;
  }
  return os.str();
}

std::string term_key(const EquationTerm& t) {
  std::ostringstream os;
  for (long long c : t.shift.coords) os << c << ';';
  os << '#' << set_key(t.set);
  return os.str();
}

std::string equation_key(const FunctionalEquation& eq) {
  std::ostringstream os;
  os << "U";
  for (int w : eq.support) os << w << ',';
  std::vector<std::string> keys;
  keys.reserve(eq.terms.size());
  for (const auto& t : eq.terms) keys.push_back(term_key(t));
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) os << '{' << k << '}';
  return os.str();
}

void validate_equation_shape(const FunctionalSystem& system,
                             const FunctionalEquation& eq) {
  if (eq.support.empty()) {
    throw std::invalid_argument("functional equation: empty support");
  }
  for (std::size_t i = 0; i < eq.support.size(); ++i) {
    int w = eq.support[i];
    if (w < 0 || w >= static_cast<int>(system.components.size())) {
      throw std::invalid_argument("functional equation: support out of range");
    }
    if (i > 0 && eq.support[i - 1] >= w) {
      throw std::invalid_argument(
          "functional equation: support must be strictly increasing");
    }
  }
  if (eq.terms.empty()) {
    throw std::invalid_argument("functional equation: no terms");
  }
  for (const auto& t : eq.terms) {
    if (t.shift.group != system.domain) {
      throw std::invalid_argument(
          "functional equation: shift not in the domain group");
    }
    if (t.set.kind == SetExpr::Kind::kExplicit && t.set.values.empty()) {
      throw std::invalid_argument("functional equation: empty explicit set");
    }
  }
}

/**
 * Execution plan for one equation.  kCount materializes every term set and
 * checks exact cover with a counting array; the kernel kinds avoid
 * materializing product codomains that are too large.
 */
struct EquationPlan {
  enum class Kind { kCount, kAllKernel, kKernelPair };
  Kind kind = Kind::kCount;

  std::vector<int> support;
  std::vector<GroupSpec> comp_specs;       // support components
  std::vector<long long> coord_orders;     // concatenated coordinate orders
  std::vector<long long> coord_strides;    // row-major strides (kCount)
  long long hu_order = 0;                  // only valid for kCount

  // kCount: materialized term sets as concatenated coordinate tuples.
  std::vector<std::vector<std::vector<long long>>> term_tuples;

  // Kernel kinds.
  long long modulus = 0;
  std::vector<std::vector<long long>> rows;
  bool counts_match = true;   // kAllKernel: J * |K| == |H_U|
  int kernel_term = 0;        // kKernelPair
  int complement_term = 1;    // kKernelPair

  // Scratch for kCount evaluation.
  mutable std::vector<long long> stamp;
  mutable long long epoch = 0;
};

/** Concatenated coordinates of the support tuple, from dense values. */
void decode_tuple(const EquationPlan& plan,
                  const std::vector<long long>& dense_values,
                  std::vector<long long>& out) {
  out.clear();
  for (std::size_t p = 0; p < plan.comp_specs.size(); ++p) {
    const auto& orders = plan.comp_specs[p].torsion_orders;
    long long v = dense_values[p];
    std::size_t base = out.size();
    out.resize(base + orders.size());
    for (std::size_t i = orders.size(); i-- > 0;) {
      out[base + i] = v % orders[i];
      v /= orders[i];
    }
  }
}

EquationPlan build_plan(const std::vector<GroupSpec>& components,
                        const FunctionalEquation& eq) {
  EquationPlan plan;
  plan.support = eq.support;
  for (int w : eq.support) {
    require_finite(components[w], "check_equation");
    plan.comp_specs.push_back(components[w]);
    for (long long t : components[w].torsion_orders) {
      plan.coord_orders.push_back(t);
    }
  }
  const GroupSpec hu = support_codomain(components, eq.support);
  const Bigint hu_big = big_order(hu);

  if (!(hu_big > Bigint(kMaterializeCap))) {
    plan.kind = EquationPlan::Kind::kCount;
    plan.hu_order = hu_big.to_int64();
    plan.coord_strides.assign(plan.coord_orders.size(), 1);
    for (std::size_t i = plan.coord_orders.size(); i-- > 1;) {
      plan.coord_strides[i - 1] =
          plan.coord_strides[i] * plan.coord_orders[i];
    }
    for (const auto& t : eq.terms) {
      plan.term_tuples.push_back(materialize(t.set, hu));
    }
    plan.stamp.assign(static_cast<std::size_t>(plan.hu_order), 0);
    return plan;
  }

  // Oversized product codomain: only kernel-structured equations work.
  bool all_kernel_kinds = true;
  for (const auto& t : eq.terms) {
    if (t.set.kind == SetExpr::Kind::kExplicit) all_kernel_kinds = false;
  }
  if (!all_kernel_kinds) {
    throw std::invalid_argument(
        "check_equation: product codomain too large for explicit sets");
  }
  plan.modulus = kernel_modulus(hu);
  std::vector<std::vector<long long>> first = canonical_rows(
      eq.terms.front().set.kernel_rows, plan.modulus, plan.coord_orders.size());
  for (const auto& t : eq.terms) {
    auto rows = canonical_rows(t.set.kernel_rows, plan.modulus,
                               plan.coord_orders.size());
    if (rows != first) {
      throw std::invalid_argument(
          "check_equation: oversized equation needs one shared kernel");
    }
  }
  plan.rows = std::move(first);

  bool any_complement = false;
  bool any_kernel = false;
  for (const auto& t : eq.terms) {
    (t.set.kind == SetExpr::Kind::kKernel ? any_kernel : any_complement) = true;
  }
  if (any_complement) {
    if (eq.terms.size() != 2 || !any_kernel) {
      throw std::invalid_argument(
          "check_equation: complement terms require a kernel/complement pair");
    }
    plan.kind = EquationPlan::Kind::kKernelPair;
    bool first_is_kernel =
        eq.terms[0].set.kind == SetExpr::Kind::kKernel;
    plan.kernel_term = first_is_kernel ? 0 : 1;
    plan.complement_term = first_is_kernel ? 1 : 0;
    return plan;
  }

  plan.kind = EquationPlan::Kind::kAllKernel;
  const Bigint k_size =
      kernel_cardinality(plan.rows, plan.modulus, plan.coord_orders.size());
  plan.counts_match =
      Bigint(static_cast<long long>(eq.terms.size())) * k_size == hu_big;
  return plan;
}

/**
 * Evaluates the plan at one point: term_values[j][p] is the dense value of
 * support component p of the term-j translate alpha_U(x + h_j).
 */
bool eval_plan(const EquationPlan& plan,
               const std::vector<std::vector<long long>>& term_values) {
  thread_local std::vector<long long> scratch;
  thread_local std::vector<long long> scratch2;
  switch (plan.kind) {
    case EquationPlan::Kind::kCount: {
      ++plan.epoch;
      long long covered = 0;
      for (std::size_t j = 0; j < plan.term_tuples.size(); ++j) {
        decode_tuple(plan, term_values[j], scratch);
        for (const auto& tuple : plan.term_tuples[j]) {
          long long idx = 0;
          for (std::size_t i = 0; i < tuple.size(); ++i) {
            long long c = scratch[i] + tuple[i];
            if (c >= plan.coord_orders[i]) c -= plan.coord_orders[i];
            idx += c * plan.coord_strides[i];
          }
          if (plan.stamp[static_cast<std::size_t>(idx)] == plan.epoch) {
            return false;  // covered twice
          }
          plan.stamp[static_cast<std::size_t>(idx)] = plan.epoch;
          ++covered;
        }
      }
      return covered == plan.hu_order;
    }
    case EquationPlan::Kind::kAllKernel: {
      if (!plan.counts_match) return false;
      // Distinct cosets of one subgroup are disjoint, so with matching
      // counts exact cover is equivalent to pairwise-distinct cosets.
      for (std::size_t a = 0; a < term_values.size(); ++a) {
        decode_tuple(plan, term_values[a], scratch);
        for (std::size_t b = a + 1; b < term_values.size(); ++b) {
          decode_tuple(plan, term_values[b], scratch2);
          std::vector<long long> diff(scratch.size());
          for (std::size_t i = 0; i < scratch.size(); ++i) {
            diff[i] = scratch[i] - scratch2[i];
          }
          if (kernel_holds(plan.rows, plan.modulus, diff)) return false;
        }
      }
      return true;
    }
    case EquationPlan::Kind::kKernelPair: {
      decode_tuple(plan, term_values[plan.kernel_term], scratch);
      decode_tuple(plan, term_values[plan.complement_term], scratch2);
      std::vector<long long> diff(scratch.size());
      for (std::size_t i = 0; i < scratch.size(); ++i) {
        diff[i] = scratch[i] - scratch2[i];
      }
      return kernel_holds(plan.rows, plan.modulus, diff);
    }
  }
  return false;
}

void validate_family(const FunctionFamily& family) {
  family.domain.validate();
  if (family.lattice.group != family.domain) {
    throw std::invalid_argument("function family: lattice group mismatch");
  }
  for (const auto& comp : family.components) require_finite(comp, "family");
  if (family.values.size() != family.components.size()) {
    throw std::invalid_argument(
        "function family: one value table per component required");
  }
}

}  // namespace

SetExpr explicit_set(std::vector<std::vector<long long>> values) {
  SetExpr s;
  s.kind = SetExpr::Kind::kExplicit;
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw std::invalid_argument("explicit_set: duplicate tuple");
  }
  s.values = std::move(values);
  return s;
}

SetExpr kernel_set(std::vector<std::vector<long long>> rows) {
  SetExpr s;
  s.kind = SetExpr::Kind::kKernel;
  s.kernel_rows = std::move(rows);
  return s;
}

SetExpr kernel_complement_set(std::vector<std::vector<long long>> rows) {
  SetExpr s;
  s.kind = SetExpr::Kind::kKernelComplement;
  s.kernel_rows = std::move(rows);
  return s;
}

GroupSpec support_codomain(const std::vector<GroupSpec>& components,
                           const std::vector<int>& support) {
  GroupSpec out;
  out.free_rank = 0;
  for (int w : support) {
    if (w < 0 || w >= static_cast<int>(components.size())) {
      throw std::invalid_argument("support_codomain: component out of range");
    }
    require_finite(components[w], "support_codomain");
    for (long long t : components[w].torsion_orders) {
      out.torsion_orders.push_back(t);
    }
  }
  return out;
}

long long group_order(const GroupSpec& finite_group) {
  require_finite(finite_group, "group_order");
  Bigint n = big_order(finite_group);
  if (!n.fits_int64()) {
    throw std::overflow_error("group_order: order exceeds 64 bits");
  }
  return n.to_int64();
}

long long dense_index(const GroupSpec& finite_group,
                      const std::vector<long long>& coords) {
  require_finite(finite_group, "dense_index");
  if (coords.size() != finite_group.torsion_orders.size()) {
    throw std::invalid_argument("dense_index: coordinate count mismatch");
  }
  long long idx = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    long long n = finite_group.torsion_orders[i];
    long long c = coords[i];
    if (c < 0 || c >= n) {
      throw std::invalid_argument("dense_index: coordinate out of range");
    }
    idx = idx * n + c;
  }
  return idx;
}

std::vector<long long> coords_at(const GroupSpec& finite_group,
                                 long long index) {
  require_finite(finite_group, "coords_at");
  const auto& orders = finite_group.torsion_orders;
  if (index < 0 || Bigint(index) >= big_order(finite_group)) {
    throw std::invalid_argument("coords_at: index out of range");
  }
  std::vector<long long> coords(orders.size());
  for (std::size_t i = orders.size(); i-- > 0;) {
    coords[i] = index % orders[i];
    index /= orders[i];
  }
  return coords;
}

bool set_contains(const SetExpr& set, const GroupSpec& codomain,
                  const std::vector<long long>& tuple) {
  require_finite(codomain, "set_contains");
  if (tuple.size() != codomain.torsion_orders.size()) {
    throw std::invalid_argument("set_contains: tuple length mismatch");
  }
  switch (set.kind) {
    case SetExpr::Kind::kExplicit:
      return std::binary_search(set.values.begin(), set.values.end(), tuple);
    case SetExpr::Kind::kKernel: {
      long long n = kernel_modulus(codomain);
      auto rows = canonical_rows(set.kernel_rows, n, tuple.size());
      return kernel_holds(rows, n, tuple);
    }
    case SetExpr::Kind::kKernelComplement: {
      long long n = kernel_modulus(codomain);
      auto rows = canonical_rows(set.kernel_rows, n, tuple.size());
      return !kernel_holds(rows, n, tuple);
    }
  }
  return false;
}

std::vector<std::vector<long long>> materialize(const SetExpr& set,
                                                const GroupSpec& codomain) {
  require_finite(codomain, "materialize");
  if (set.kind == SetExpr::Kind::kExplicit) {
    for (const auto& v : set.values) {
      if (v.size() != codomain.torsion_orders.size()) {
        throw std::invalid_argument("materialize: tuple length mismatch");
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0 || v[i] >= codomain.torsion_orders[i]) {
          throw std::invalid_argument("materialize: coordinate out of range");
        }
      }
    }
    return set.values;
  }
  Bigint order = big_order(codomain);
  if (order > Bigint(kMaterializeCap)) {
    throw std::length_error("materialize: codomain exceeds 4096 elements");
  }
  long long n = order.to_int64();
  long long mod = kernel_modulus(codomain);
  auto rows = canonical_rows(set.kernel_rows, mod,
                             codomain.torsion_orders.size());
  bool want = set.kind == SetExpr::Kind::kKernel;
  std::vector<std::vector<long long>> out;
  for (long long i = 0; i < n; ++i) {
    auto coords = coords_at(codomain, i);
    if (kernel_holds(rows, mod, coords) == want) out.push_back(coords);
  }
  return out;
}

void append_equation(FunctionalSystem& system, FunctionalEquation equation) {
  validate_equation_shape(system, equation);
  std::sort(equation.terms.begin(), equation.terms.end(),
            [](const EquationTerm& a, const EquationTerm& b) {
              if (a.shift.coords != b.shift.coords) {
                return a.shift.coords < b.shift.coords;
              }
              return set_key(a.set) < set_key(b.set);
            });
  const std::string key = equation_key(equation);
  for (const auto& existing : system.equations) {
    if (equation_key(existing) == key) return;
  }
  system.equations.push_back(std::move(equation));
}

bool check_equation(const FunctionFamily& family,
                    const FunctionalEquation& equation) {
  validate_family(family);
  FunctionalSystem shell{family.domain, family.components, {}};
  validate_equation_shape(shell, equation);
  Quotient q(family.domain, family.lattice);
  const long long cells = q.size();
  for (int w : equation.support) {
    if (static_cast<long long>(family.values[w].size()) != cells) {
      throw std::invalid_argument("check_equation: value table size mismatch");
    }
  }
  EquationPlan plan = build_plan(family.components, equation);

  // Shifted-cell table: cell index of x + h_j for every cell and term.
  const std::size_t terms = equation.terms.size();
  std::vector<std::vector<long long>> shifted(terms);
  for (std::size_t j = 0; j < terms; ++j) {
    shifted[j].resize(static_cast<std::size_t>(cells));
    for (long long c = 0; c < cells; ++c) {
      shifted[j][static_cast<std::size_t>(c)] =
          q.index_of(add(q.representative(c), equation.terms[j].shift));
    }
  }

  std::vector<std::vector<long long>> term_values(
      terms, std::vector<long long>(equation.support.size()));
  for (long long c = 0; c < cells; ++c) {
    for (std::size_t j = 0; j < terms; ++j) {
      long long cj = shifted[j][static_cast<std::size_t>(c)];
      for (std::size_t p = 0; p < equation.support.size(); ++p) {
        term_values[j][p] =
            family.values[equation.support[p]][static_cast<std::size_t>(cj)];
      }
    }
    if (!eval_plan(plan, term_values)) return false;
  }
  return true;
}

SystemCheckReport check_system(const FunctionFamily& family,
                               const FunctionalSystem& system) {
  if (system.domain != family.domain ||
      system.components.size() != family.components.size()) {
    throw std::invalid_argument("check_system: family/system shape mismatch");
  }
  for (std::size_t w = 0; w < system.components.size(); ++w) {
    if (system.components[w] != family.components[w]) {
      throw std::invalid_argument("check_system: component codomain mismatch");
    }
  }
  SystemCheckReport report;
  for (std::size_t i = 0; i < system.equations.size(); ++i) {
    if (!check_equation(family, system.equations[i])) {
      report.holds = false;
      report.failed_equation = static_cast<int>(i);
      report.failed_label = system.equations[i].label;
      return report;
    }
  }
  return report;
}

namespace {

/** One equation instantiated at one quotient cell. */
struct Instance {
  int plan = 0;  // index into plans
  // slot_source[j][p]: >= 0 -> CSP variable id; < 0 -> ~fixed_value.
  std::vector<std::vector<long long>> slot_source;
  std::vector<int> vars;  // distinct variable ids, ascending
};

struct CspState {
  std::vector<EquationPlan> plans;
  std::vector<Instance> instances;
  std::vector<std::vector<int>> var_instances;  // var -> instance indices
  std::vector<long long> domain_size;           // per variable
  std::vector<std::vector<char>> alive;
  std::vector<long long> alive_count;
  std::vector<long long> assignment;  // -1 = unassigned
  // Monotone change counter; var_stamp[v] records the revision of v's most
  // recent domain change or assignment.  Stamps survive backtracking (the
  // counter never decreases), so a stale instance stamp can only cause a
  // re-check, never a missed one.
  long long revision = 0;
  std::vector<long long> var_stamp;
  long long nodes = 0;
  long long node_cap = 0;

  enum class TrailKind { kMark, kRemoval, kAssign };
  struct TrailEntry {
    TrailKind kind;
    int var;
    long long value;
  };
  std::vector<TrailEntry> trail;

  void push_mark() { trail.push_back({TrailKind::kMark, -1, 0}); }

  void undo_to_mark() {
    while (!trail.empty()) {
      TrailEntry e = trail.back();
      trail.pop_back();
      if (e.kind == TrailKind::kMark) return;
      if (e.kind == TrailKind::kRemoval) {
        alive[e.var][static_cast<std::size_t>(e.value)] = 1;
        ++alive_count[e.var];
      } else {
        assignment[e.var] = -1;
      }
    }
  }

  bool remove_value(int var, long long value) {
    if (!alive[var][static_cast<std::size_t>(value)]) return true;
    alive[var][static_cast<std::size_t>(value)] = 0;
    --alive_count[var];
    trail.push_back({TrailKind::kRemoval, var, value});
    var_stamp[var] = ++revision;
    return alive_count[var] > 0;
  }

  void assign(int var, long long value) {
    assignment[var] = value;
    trail.push_back({TrailKind::kAssign, var, 0});
    var_stamp[var] = ++revision;
  }
};

}  // namespace

WeakCheckResult check_weak_property(const ExistentialWrapper& wrapper,
                                    const FunctionFamily& given,
                                    const WeakCheckOptions& options) {
  const FunctionalSystem& sys = wrapper.inner;
  validate_family(given);
  if (given.domain != sys.domain ||
      given.components.size() != sys.components.size()) {
    throw std::invalid_argument(
        "check_weak_property: family/system shape mismatch");
  }
  std::vector<char> quantified(sys.components.size(), 0);
  for (int w : wrapper.quantified) {
    if (w < 0 || w >= static_cast<int>(sys.components.size())) {
      throw std::invalid_argument(
          "check_weak_property: quantified component out of range");
    }
    quantified[static_cast<std::size_t>(w)] = 1;
  }

  Quotient q(sys.domain, given.lattice);
  const long long cells = q.size();

  // Variable ids: rank within the quantified list x cell.
  std::vector<int> var_base(sys.components.size(), -1);
  std::vector<long long> comp_order(sys.components.size(), 0);
  int nvars = 0;
  for (std::size_t r = 0; r < wrapper.quantified.size(); ++r) {
    int w = wrapper.quantified[r];
    long long order = group_order(sys.components[static_cast<std::size_t>(w)]);
    if (order > kMaterializeCap) {
      throw std::length_error(
          "check_weak_property: quantified codomain exceeds 4096 elements");
    }
    var_base[static_cast<std::size_t>(w)] = nvars;
    nvars += static_cast<int>(cells);
  }
  for (std::size_t w = 0; w < sys.components.size(); ++w) {
    comp_order[w] = group_order(sys.components[w]);
    if (!quantified[w]) {
      if (static_cast<long long>(given.values[w].size()) != cells) {
        throw std::invalid_argument(
            "check_weak_property: missing value table for a visible component");
      }
    }
  }

  CspState st;
  st.node_cap = options.node_cap;
  st.assignment.assign(static_cast<std::size_t>(nvars), -1);
  st.alive.resize(static_cast<std::size_t>(nvars));
  st.alive_count.resize(static_cast<std::size_t>(nvars));
  st.domain_size.resize(static_cast<std::size_t>(nvars));
  st.var_instances.resize(static_cast<std::size_t>(nvars));
  st.var_stamp.assign(static_cast<std::size_t>(nvars), 0);
  for (std::size_t r = 0; r < wrapper.quantified.size(); ++r) {
    int w = wrapper.quantified[r];
    long long order = comp_order[static_cast<std::size_t>(w)];
    for (long long c = 0; c < cells; ++c) {
      int v = var_base[static_cast<std::size_t>(w)] + static_cast<int>(c);
      st.domain_size[v] = order;
      st.alive[v].assign(static_cast<std::size_t>(order), 1);
      st.alive_count[v] = order;
    }
  }

  // Build plans and instances.
  for (const auto& eq : sys.equations) {
    FunctionalSystem shell{sys.domain, sys.components, {}};
    validate_equation_shape(shell, eq);
    st.plans.push_back(build_plan(sys.components, eq));
    const int plan_idx = static_cast<int>(st.plans.size()) - 1;
    std::vector<std::vector<long long>> shifted(eq.terms.size());
    for (std::size_t j = 0; j < eq.terms.size(); ++j) {
      shifted[j].resize(static_cast<std::size_t>(cells));
      for (long long c = 0; c < cells; ++c) {
        shifted[j][static_cast<std::size_t>(c)] =
            q.index_of(add(q.representative(c), eq.terms[j].shift));
      }
    }
    for (long long c = 0; c < cells; ++c) {
      Instance inst;
      inst.plan = plan_idx;
      inst.slot_source.resize(eq.terms.size());
      for (std::size_t j = 0; j < eq.terms.size(); ++j) {
        inst.slot_source[j].resize(eq.support.size());
        long long cj = shifted[j][static_cast<std::size_t>(c)];
        for (std::size_t p = 0; p < eq.support.size(); ++p) {
          int w = eq.support[p];
          if (quantified[static_cast<std::size_t>(w)]) {
            int var = var_base[static_cast<std::size_t>(w)] +
                      static_cast<int>(cj);
            inst.slot_source[j][p] = var;
            inst.vars.push_back(var);
          } else {
            inst.slot_source[j][p] =
                ~given.values[static_cast<std::size_t>(w)]
                             [static_cast<std::size_t>(cj)];
          }
        }
      }
      std::sort(inst.vars.begin(), inst.vars.end());
      inst.vars.erase(std::unique(inst.vars.begin(), inst.vars.end()),
                      inst.vars.end());
      const int idx = static_cast<int>(st.instances.size());
      for (int v : inst.vars) st.var_instances[v].push_back(idx);
      st.instances.push_back(std::move(inst));
    }
  }

  // Evaluates an instance; override_var >= 0 substitutes override_value.
  std::vector<std::vector<long long>> term_values;
  auto eval_instance = [&](const Instance& inst, int override_var,
                           long long override_value) {
    const EquationPlan& plan = st.plans[static_cast<std::size_t>(inst.plan)];
    term_values.assign(inst.slot_source.size(), {});
    for (std::size_t j = 0; j < inst.slot_source.size(); ++j) {
      term_values[j].resize(inst.slot_source[j].size());
      for (std::size_t p = 0; p < inst.slot_source[j].size(); ++p) {
        long long src = inst.slot_source[j][p];
        long long value;
        if (src < 0) {
          value = ~src;
        } else if (static_cast<int>(src) == override_var) {
          value = override_value;
        } else {
          value = st.assignment[static_cast<std::size_t>(src)];
        }
        term_values[j][p] = value;
      }
    }
    return eval_plan(plan, term_values);
  };

  // Processes one instance: evaluate when fully known; otherwise enforce
  // generalized arc consistency whenever the product of the unknowns'
  // domains fits the budget (larger instances are deferred until further
  // assignments shrink them).  Each call runs the instance to its own
  // fixpoint.  Returns false on contradiction.  Variables whose domain
  // changed are queued (once) for neighbour reprocessing.
  constexpr long long kGacBudget = 4096;
  std::deque<int> queue;
  std::vector<char> var_queued(static_cast<std::size_t>(nvars), 0);
  std::vector<long long> inst_stamp(st.instances.size(), -1);
  auto enqueue = [&](int var) {
    if (!var_queued[static_cast<std::size_t>(var)]) {
      var_queued[static_cast<std::size_t>(var)] = 1;
      queue.push_back(var);
    }
  };
  auto clear_queue = [&]() {
    for (int var : queue) var_queued[static_cast<std::size_t>(var)] = 0;
    queue.clear();
  };
  std::vector<int> unk;
  std::vector<std::vector<long long>> live;
  std::vector<std::vector<char>> supp;
  std::vector<std::size_t> pos;
  struct Slot {
    int unknown, term, coord;
  };
  std::vector<Slot> slots;
  auto process_instance = [&](int inst_idx) {
    const Instance& inst = st.instances[static_cast<std::size_t>(inst_idx)];
    const EquationPlan& plan = st.plans[static_cast<std::size_t>(inst.plan)];
    unk.clear();
    for (int v : inst.vars) {
      if (st.assignment[static_cast<std::size_t>(v)] < 0) unk.push_back(v);
    }
    if (unk.empty()) return eval_instance(inst, -1, 0);
    long long combos = 1;
    for (int v : unk) {
      combos *= st.alive_count[v];
      if (combos > kGacBudget) return true;  // deferred
    }
    const std::size_t k = unk.size();
    // Fill the fixed slots once; remember which slots each unknown feeds.
    slots.clear();
    term_values.assign(inst.slot_source.size(), {});
    for (std::size_t j = 0; j < inst.slot_source.size(); ++j) {
      term_values[j].resize(inst.slot_source[j].size());
      for (std::size_t p = 0; p < inst.slot_source[j].size(); ++p) {
        const long long src = inst.slot_source[j][p];
        if (src < 0) {
          term_values[j][p] = ~src;
        } else if (st.assignment[static_cast<std::size_t>(src)] >= 0) {
          term_values[j][p] = st.assignment[static_cast<std::size_t>(src)];
        } else {
          for (std::size_t i = 0; i < k; ++i) {
            if (unk[i] == static_cast<int>(src)) {
              slots.push_back({static_cast<int>(i), static_cast<int>(j),
                               static_cast<int>(p)});
              break;
            }
          }
        }
      }
    }
    if (live.size() < k) {
      live.resize(k);
      supp.resize(k);
    }
    // A single sweep marks support for all unknowns at once, but removals
    // made at the end of a sweep can invalidate tuples that supported other
    // values, so sweep until nothing changes.
    bool again = true;
    while (again) {
      again = false;
      for (std::size_t i = 0; i < k; ++i) {
        live[i].clear();
        const int v = unk[i];
        for (long long value = 0; value < st.domain_size[v]; ++value) {
          if (st.alive[v][static_cast<std::size_t>(value)]) {
            live[i].push_back(value);
          }
        }
        supp[i].assign(static_cast<std::size_t>(st.domain_size[v]), 0);
      }
      pos.assign(k, 0);
      bool any = false;
      while (true) {
        for (const Slot& s : slots) {
          term_values[static_cast<std::size_t>(s.term)]
                     [static_cast<std::size_t>(s.coord)] =
              live[static_cast<std::size_t>(s.unknown)]
                  [pos[static_cast<std::size_t>(s.unknown)]];
        }
        if (eval_plan(plan, term_values)) {
          any = true;
          for (std::size_t i = 0; i < k; ++i) {
            supp[i][static_cast<std::size_t>(live[i][pos[i]])] = 1;
          }
        }
        std::size_t i = 0;
        while (i < k && ++pos[i] == live[i].size()) pos[i++] = 0;
        if (i == k) break;
      }
      if (!any) return false;
      for (std::size_t i = 0; i < k; ++i) {
        const int v = unk[i];
        bool changed = false;
        for (long long value : live[i]) {
          if (!supp[i][static_cast<std::size_t>(value)]) {
            changed = true;
            if (!st.remove_value(v, value)) return false;
          }
        }
        if (changed) {
          again = true;
          enqueue(v);
        }
      }
    }
    for (int v : unk) {
      if (st.alive_count[v] == 1 &&
          st.assignment[static_cast<std::size_t>(v)] < 0) {
        for (long long value = 0; value < st.domain_size[v]; ++value) {
          if (st.alive[v][static_cast<std::size_t>(value)]) {
            st.assign(v, value);
            break;
          }
        }
      }
    }
    return true;
  };

  auto propagate = [&]() {
    while (!queue.empty()) {
      int var = queue.front();
      queue.pop_front();
      var_queued[static_cast<std::size_t>(var)] = 0;
      for (int inst_idx : st.var_instances[static_cast<std::size_t>(var)]) {
        const Instance& inst =
            st.instances[static_cast<std::size_t>(inst_idx)];
        long long newest = 0;
        for (int v : inst.vars) {
          newest = std::max(newest, st.var_stamp[static_cast<std::size_t>(v)]);
        }
        if (newest <= inst_stamp[static_cast<std::size_t>(inst_idx)]) {
          continue;  // nothing changed since this instance last ran
        }
        if (!process_instance(inst_idx)) {
          clear_queue();
          return false;
        }
        inst_stamp[static_cast<std::size_t>(inst_idx)] = st.revision;
      }
    }
    return true;
  };

  WeakCheckResult result;

  // Every equation asserts a disjoint cover of the full group H_U, so
  // adding a constant to any one component preserves every equation.  Each
  // quantified component may therefore be normalized to value 0 at the
  // reference cell, which quotients the search space by exactly |H_w| per
  // auxiliary component.
  for (std::size_t r = 0; r < wrapper.quantified.size(); ++r) {
    const int v = var_base[static_cast<std::size_t>(wrapper.quantified[r])];
    for (long long value = 1; value < st.domain_size[v]; ++value) {
      st.remove_value(v, value);
    }
    st.assign(v, 0);
  }

  // Seed: evaluate/filter every instance once, then settle the queue.
  bool ok = true;
  for (std::size_t i = 0; ok && i < st.instances.size(); ++i) {
    ok = process_instance(static_cast<int>(i));
    if (ok) inst_stamp[i] = st.revision;
  }
  if (!ok) clear_queue();
  ok = ok && propagate();

  // Backtracking over one connected component of the residual constraint
  // graph.  Components are independent: no instance links unassigned
  // variables across them, so each is solved once and a failing component
  // refutes the whole node without backtracking across the split.
  std::vector<int> uf(static_cast<std::size_t>(nvars));
  std::function<int(int)> uf_find = [&](int v) {
    while (uf[static_cast<std::size_t>(v)] != v) {
      uf[static_cast<std::size_t>(v)] =
          uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(v)])];
      v = uf[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::function<bool(const std::vector<int>&)> search =
      [&](const std::vector<int>& scope) -> bool {
    std::vector<int> open;
    for (int v : scope) {
      if (st.assignment[static_cast<std::size_t>(v)] < 0) open.push_back(v);
    }
    if (open.empty()) return true;
    for (int v : open) uf[static_cast<std::size_t>(v)] = v;
    for (const Instance& inst : st.instances) {
      int prev = -1;
      for (int v : inst.vars) {
        if (st.assignment[static_cast<std::size_t>(v)] >= 0) continue;
        if (prev >= 0) {
          uf[static_cast<std::size_t>(uf_find(v))] = uf_find(prev);
        }
        prev = v;
      }
    }
    const int root = uf_find(open[0]);
    std::vector<int> mine, rest;
    for (int v : open) {
      (uf_find(v) == root ? mine : rest).push_back(v);
    }
    if (!rest.empty()) {
      // uf is clobbered by recursion; capture the splits first.
      std::vector<std::vector<int>> parts;
      parts.push_back(std::move(mine));
      std::vector<int> reps;
      for (int v : rest) {
        const int r = uf_find(v);
        std::size_t p = 0;
        for (; p < reps.size(); ++p) {
          if (reps[p] == r) break;
        }
        if (p == reps.size()) {
          reps.push_back(r);
          parts.emplace_back();
        }
        parts[p + 1].push_back(v);
      }
      for (const auto& part : parts) {
        if (!search(part)) return false;
      }
      return true;
    }
    int best = -1;
    for (int v : mine) {
      if (best < 0 || st.alive_count[v] < st.alive_count[best]) best = v;
    }
    for (long long value = 0; value < st.domain_size[best]; ++value) {
      if (!st.alive[best][static_cast<std::size_t>(value)]) continue;
      if (++st.nodes > st.node_cap) {
        throw std::length_error("check_weak_property: node cap exceeded");
      }
      st.push_mark();
      st.assign(best, value);
      clear_queue();
      enqueue(best);
      if (propagate() && search(mine)) return true;
      st.undo_to_mark();
    }
    return false;
  };

  std::vector<int> all_vars(static_cast<std::size_t>(nvars));
  for (int v = 0; v < nvars; ++v) all_vars[static_cast<std::size_t>(v)] = v;
  result.satisfiable = ok && (nvars == 0 ? true : search(all_vars));
  result.nodes_visited = st.nodes;
  if (result.satisfiable) {
    for (std::size_t r = 0; r < wrapper.quantified.size(); ++r) {
      int w = wrapper.quantified[r];
      std::vector<long long> table(static_cast<std::size_t>(cells));
      for (long long c = 0; c < cells; ++c) {
        table[static_cast<std::size_t>(c)] =
            st.assignment[static_cast<std::size_t>(
                var_base[static_cast<std::size_t>(w)] + c)];
      }
      result.witness.push_back(std::move(table));
    }
  }
  return result;
}

bool verify_force_compat(int m_exponent) {
  if (m_exponent < 2) {
    throw std::invalid_argument("verify_force_compat: M must be at least 2");
  }
  const long long n = 1LL << m_exponent;
  const long long half = n / 2;
  auto md = [n](long long v) { return ((v % n) + n) % n; };
  auto is_translate = [&](long long p1, long long p2, long long q1,
                          long long q2) {
    return md(q1 - p1) == md(q2 - p2) || md(q1 - p2) == md(q2 - p1);
  };
  // Opposite-parity pairs: (2a, 2b+1).
  struct Pair {
    long long x, y;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(half * half));
  for (long long a = 0; a < half; ++a) {
    for (long long b = 0; b < half; ++b) {
      pairs.push_back({2 * a, 2 * b + 1});
    }
  }
  for (const Pair& ab : pairs) {
    for (const Pair& cd : pairs) {
      for (const Pair& fg : pairs) {
        for (const Pair& hk1 : pairs) {
          for (const Pair& hk2 : pairs) {
            const long long lhs =
                md(ab.x + ab.y + hk1.x + hk1.y + hk2.x + hk2.y);
            const long long rhs0 = md(2 * (cd.x + cd.y) + fg.x + fg.y);
            // Solve lhs = rhs0 + 2z (mod n): none when the residual is odd.
            const long long residual = md(lhs - rhs0);
            if (residual % 2 != 0) continue;
            for (long long z : {residual / 2, md(residual / 2 + half)}) {
              bool hypothesis = true;
              for (long long alpha : {ab.x, ab.y}) {
                for (long long t1 : {hk1.x, hk1.y}) {
                  for (long long t2 : {hk2.x, hk2.y}) {
                    bool found = false;
                    for (long long beta : {cd.x, cd.y}) {
                      for (long long gamma : {fg.x, fg.y}) {
                        if (md(alpha + t1 + t2) ==
                            md(2 * beta + gamma + z)) {
                          found = true;
                        }
                      }
                    }
                    if (!found) hypothesis = false;
                  }
                }
              }
              if (!hypothesis) continue;
              if (!is_translate(ab.x, ab.y, hk1.x, hk1.y) ||
                  !is_translate(ab.x, ab.y, hk2.x, hk2.y) ||
                  !is_translate(hk1.x, hk1.y, hk2.x, hk2.y)) {
                return false;
              }
            }
          }
        }
      }
    }
  }
  return true;
}

}  // namespace forge
