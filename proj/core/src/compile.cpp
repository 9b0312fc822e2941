#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "forge/functional.hpp"

namespace forge {

namespace {

GroupSpec cyclic_group(long long n) { return GroupSpec{0, {n}}; }

std::vector<GroupElement> directions_or_all(
    const GroupSpec& domain, const std::vector<GroupElement>& given) {
  std::vector<GroupElement> out;
  if (given.empty()) {
    for (int i = 0; i < domain.rank(); ++i) {
      out.push_back(standard_generator(domain, i));
    }
    return out;
  }
  for (const auto& v : given) {
    if (v.group != domain) {
      throw std::invalid_argument("direction not in the domain group");
    }
    out.push_back(v);
  }
  return out;
}

/** True when the order of v is at least bound (infinite order counts). */
bool order_at_least(const GroupElement& v, long long bound) {
  const GroupSpec& g = v.group;
  for (int i = 0; i < g.free_rank; ++i) {
    if (v.coords[static_cast<std::size_t>(i)] != 0) return true;
  }
  long long ord = 1;
  for (std::size_t i = 0; i < g.torsion_orders.size(); ++i) {
    long long n = g.torsion_orders[i];
    long long c = v.coords[static_cast<std::size_t>(g.free_rank) + i];
    long long oi = n / std::gcd(n, c == 0 ? n : c);
    ord = std::lcm(ord, oi);
    if (ord >= bound) return true;
  }
  return ord >= bound;
}

bool has_order_two(const GroupElement& v) {
  return v != zero_element(v.group) &&
         scale(2, v) == zero_element(v.group);
}

std::vector<std::vector<long long>> all_tuples(const GroupSpec& h) {
  long long n = group_order(h);
  if (n > 4096) {
    throw std::length_error("set complement: codomain exceeds 4096 elements");
  }
  std::vector<std::vector<long long>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) out.push_back(coords_at(h, i));
  return out;
}

SetExpr set_complement(const SetExpr& s, const GroupSpec& h) {
  switch (s.kind) {
    case SetExpr::Kind::kKernel:
      return kernel_complement_set(s.kernel_rows);
    case SetExpr::Kind::kKernelComplement:
      return kernel_set(s.kernel_rows);
    case SetExpr::Kind::kExplicit: {
      std::vector<std::vector<long long>> rest;
      for (auto& t : all_tuples(h)) {
        if (!std::binary_search(s.values.begin(), s.values.end(), t)) {
          rest.push_back(std::move(t));
        }
      }
      return explicit_set(std::move(rest));
    }
  }
  throw std::logic_error("set_complement: unknown kind");
}

bool set_is_empty(const SetExpr& s, const GroupSpec& h) {
  if (s.kind == SetExpr::Kind::kExplicit) return s.values.empty();
  if (s.kind == SetExpr::Kind::kKernel) return false;  // contains zero
  // A kernel complement is empty exactly when every coefficient row
  // annihilates the whole codomain, i.e. all entries are 0 mod the order.
  long long n = h.torsion_orders.empty() ? 1 : h.torsion_orders.front();
  for (const auto& row : s.kernel_rows) {
    for (long long c : row) {
      if (((c % n) + n) % n != 0) return false;
    }
  }
  return true;
}

/**
 * Constancy of the supported tuple modulo `subgroup` along each direction:
 * (alpha_U(x) + H') disjoint-union (alpha_U(x + v) + (H_U minus H')) = H_U.
 */
void emit_constancy(FunctionalSystem& sys, const std::vector<int>& support,
                    const SetExpr& subgroup,
                    const std::vector<GroupElement>& dirs,
                    const std::string& label) {
  const GroupSpec hu = support_codomain(sys.components, support);
  const SetExpr rest = set_complement(subgroup, hu);
  const GroupElement zero = zero_element(sys.domain);
  for (const auto& v : dirs) {
    FunctionalEquation eq;
    eq.support = support;
    eq.label = label;
    eq.terms.push_back({zero, subgroup});
    if (!set_is_empty(rest, hu)) eq.terms.push_back({v, rest});
    append_equation(sys, std::move(eq));
  }
}

void emit_periodic(FunctionalSystem& sys, int comp,
                   const std::vector<GroupElement>& periods,
                   const std::string& label) {
  const GroupSpec& h = sys.components[static_cast<std::size_t>(comp)];
  std::vector<long long> zero(h.torsion_orders.size(), 0);
  emit_constancy(sys, {comp}, explicit_set({zero}), periods, label);
}

void emit_boolean(FunctionalSystem& sys, int comp, const GroupElement& e,
                  int m, const std::string& label) {
  if (m < 1) {
    throw std::invalid_argument("boolean property: M must be at least 1");
  }
  if (e.group != sys.domain || !has_order_two(e)) {
    throw std::invalid_argument("boolean property: e must have order two");
  }
  const long long half = 1LL << (m - 1);
  const GroupSpec& h = sys.components[static_cast<std::size_t>(comp)];
  if (h != cyclic_group(1LL << m)) {
    throw std::invalid_argument("boolean property: codomain must be Z/2^M");
  }
  const SetExpr evens = kernel_set({{half}});
  const GroupElement zero = zero_element(sys.domain);

  FunctionalEquation parity;
  parity.support = {comp};
  parity.label = label + "/opposite-parity";
  parity.terms.push_back({zero, evens});
  parity.terms.push_back({e, evens});
  append_equation(sys, std::move(parity));

  std::vector<std::vector<long long>> even_nonzero;
  for (long long v = 2; v < 2 * half; v += 2) even_nonzero.push_back({v});
  for (int i = 0; i < sys.domain.rank(); ++i) {
    const GroupElement g = standard_generator(sys.domain, i);
    FunctionalEquation eq;
    eq.support = {comp};
    eq.label = label + "/two-valued";
    eq.terms.push_back({g, explicit_set({{0}})});
    eq.terms.push_back({add(e, g), explicit_set({{0}})});
    if (!even_nonzero.empty()) {
      eq.terms.push_back({zero, explicit_set(even_nonzero)});
      eq.terms.push_back({e, explicit_set(even_nonzero)});
    }
    append_equation(sys, std::move(eq));
  }
}

void emit_linear(FunctionalSystem& sys, const std::vector<int>& support,
                 const std::vector<long long>& coeffs, long long n,
                 const std::vector<GroupElement>& dirs,
                 const std::string& label) {
  if (support.size() != coeffs.size()) {
    throw std::invalid_argument("linear constraint: one coefficient per "
                                "component required");
  }
  for (int w : support) {
    if (sys.components[static_cast<std::size_t>(w)] != cyclic_group(n)) {
      throw std::invalid_argument(
          "linear constraint: components must be Z/N");
    }
  }
  bool degenerate = true;
  for (long long c : coeffs) {
    if (((c % n) + n) % n != 0) degenerate = false;
  }
  if (degenerate) return;  // the constraint holds identically
  emit_constancy(sys, support, kernel_set({coeffs}), dirs, label);
}

void require_subgroup(const SetExpr& s, const GroupSpec& h) {
  if (!h.is_finite()) {
    throw std::domain_error("constant-mod-subgroup: finite codomain required");
  }
  const std::size_t width = h.torsion_orders.size();
  switch (s.kind) {
    case SetExpr::Kind::kKernelComplement:
      throw std::invalid_argument(
          "constant-mod-subgroup: a kernel complement is not a subgroup");
    case SetExpr::Kind::kKernel:
      for (const auto& row : s.kernel_rows) {
        if (row.size() != width) {
          throw std::invalid_argument(
              "constant-mod-subgroup: kernel row width mismatch");
        }
      }
      // Kernel sets additionally need one shared coordinate order.
      for (long long t : h.torsion_orders) {
        if (t != h.torsion_orders.front()) {
          throw std::invalid_argument(
              "constant-mod-subgroup: kernel needs equal coordinate orders");
        }
      }
      return;
    case SetExpr::Kind::kExplicit: {
      const std::vector<long long> zero(width, 0);
      if (!std::binary_search(s.values.begin(), s.values.end(), zero)) {
        throw std::invalid_argument(
            "constant-mod-subgroup: subgroup must contain zero");
      }
      for (const auto& a : s.values) {
        for (const auto& b : s.values) {
          std::vector<long long> sum(width);
          for (std::size_t i = 0; i < width; ++i) {
            sum[i] = (a[i] + b[i]) % h.torsion_orders[i];
          }
          if (!std::binary_search(s.values.begin(), s.values.end(), sum)) {
            throw std::invalid_argument(
                "constant-mod-subgroup: set not closed under addition");
          }
        }
      }
      return;
    }
  }
}

void check_boolean_triple(const GroupSpec& domain, const GroupElement& e,
                          const GroupElement& e1, const GroupElement& e2) {
  for (const GroupElement* v : {&e, &e1, &e2}) {
    if (v->group != domain || !has_order_two(*v)) {
      throw std::invalid_argument(
          "boolean machinery: e, e', e'' must have order two");
    }
  }
  std::set<std::vector<long long>> span;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        span.insert(
            add(add(scale(a, e), scale(b, e1)), scale(c, e2)).coords);
      }
    }
  }
  if (span.size() != 8) {
    throw std::invalid_argument(
        "boolean machinery: e, e', e'' must generate (Z/2)^3");
  }
}

ExistentialWrapper compile_compatible_boolean(const GroupSpec& domain,
                                              const GroupElement& e,
                                              const GroupElement& e1,
                                              const GroupElement& e2,
                                              int m, int width) {
  if (m < 2) {
    throw std::invalid_argument("compatible boolean: M >= 2 required");
  }
  if (width < 1) {
    throw std::invalid_argument("compatible boolean: W >= 1 required");
  }
  check_boolean_triple(domain, e, e1, e2);

  ExistentialWrapper out;
  FunctionalSystem& sys = out.inner;
  sys.domain = domain;
  const GroupSpec h = cyclic_group(1LL << m);
  const int tau1 = width, tau2 = width + 1;
  sys.components.assign(static_cast<std::size_t>(3 * width + 2), h);
  for (int w = width; w < 3 * width + 2; ++w) out.quantified.push_back(w);

  for (int i = 0; i < width; ++i) {
    const std::string tag = "alpha" + std::to_string(i);
    emit_periodic(sys, i, {e1, e2}, tag + "/periodic");
    emit_boolean(sys, i, e, m, tag);
  }
  emit_periodic(sys, tau1, {add(e, e1), e2}, "tau1/periodic");
  emit_boolean(sys, tau1, e, m, "tau1");
  emit_periodic(sys, tau2, {e1, add(e, e2)}, "tau2/periodic");
  emit_boolean(sys, tau2, e, m, "tau2");
  const auto dirs = directions_or_all(domain, {});
  for (int i = 0; i < width; ++i) {
    const int beta = width + 2 + 2 * i;
    const int gamma = beta + 1;
    emit_boolean(sys, beta, e, m, "beta" + std::to_string(i));
    emit_boolean(sys, gamma, e, m, "gamma" + std::to_string(i));
    emit_linear(sys, {i, tau1, tau2, beta, gamma}, {1, 1, 1, -2, -1},
                1LL << m, dirs, "compat" + std::to_string(i));
  }
  return out;
}

ExistentialWrapper compile_symmetric(const PropertySpec& spec) {
  const int w = spec.width;
  const int m = spec.m_exponent;
  if (w < 1) {
    throw std::invalid_argument("symmetric boolean constraint: W >= 1");
  }
  if (!spec.omega) {
    throw std::invalid_argument(
        "symmetric boolean constraint: omega predicate required");
  }
  if (!((1LL << m) > 2LL * w + 4)) {
    throw std::invalid_argument(
        "symmetric boolean constraint: 2^M > 2W+4 violated");
  }
  check_boolean_triple(spec.domain, spec.e, spec.e_prime, spec.e_second);
  const int wide = w < 3 ? 3 : (w % 2 != 0 ? w : w + 1);
  if (wide > 20) {
    throw std::length_error(
        "symmetric boolean constraint: width too large to enumerate");
  }
  auto omega_padded = [&](const std::vector<int>& eps) {
    return spec.omega(std::vector<int>(eps.begin(), eps.begin() + w));
  };
  // The predicate must be symmetric under the pointwise reflection
  // eps -> 1 - eps; verified over the whole sign cube.
  std::vector<int> eps(static_cast<std::size_t>(wide), 0);
  std::vector<int> flip(static_cast<std::size_t>(wide), 0);
  for (long long mask = 0; mask < (1LL << wide); ++mask) {
    for (int i = 0; i < wide; ++i) {
      eps[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1);
      flip[static_cast<std::size_t>(i)] = 1 - eps[static_cast<std::size_t>(i)];
    }
    if (omega_padded(eps) != omega_padded(flip)) {
      throw std::invalid_argument(
          "symmetric boolean constraint: omega must be symmetric");
    }
  }
  // Excluded sign pairs, one representative (leading 0) each.
  std::vector<std::vector<int>> blocks;
  for (long long mask = 0; mask < (1LL << wide); mask += 2) {
    for (int i = 0; i < wide; ++i) {
      eps[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1);
    }
    if (!omega_padded(eps)) {
      blocks.push_back(eps);
      if (static_cast<long long>(blocks.size()) > spec.omega_cap) {
        throw std::length_error(
            "symmetric boolean constraint: exclusion blocks exceed cap");
      }
    }
  }

  ExistentialWrapper out;
  FunctionalSystem& sys = out.inner;
  sys.domain = spec.domain;
  const GroupSpec h = cyclic_group(1LL << m);
  sys.components.assign(static_cast<std::size_t>(w), h);
  // Padding components join every block's compatible tuple but are
  // otherwise unconstrained.
  std::vector<int> alphas;
  for (int i = 0; i < w; ++i) alphas.push_back(i);
  for (int i = w; i < wide; ++i) {
    alphas.push_back(static_cast<int>(sys.components.size()));
    out.quantified.push_back(static_cast<int>(sys.components.size()));
    sys.components.push_back(h);
  }

  const auto dirs = directions_or_all(spec.domain, {});
  if (blocks.empty()) {
    ExistentialWrapper base = compile_compatible_boolean(
        spec.domain, spec.e, spec.e_prime, spec.e_second, m, wide);
    embed_property(sys, out.quantified, base, alphas);
    return out;
  }
  for (const auto& block : blocks) {
    std::vector<int> combined = alphas;
    std::vector<int> betas;
    for (int j = 0; j < wide - 2; ++j) {
      const int id = static_cast<int>(sys.components.size());
      sys.components.push_back(h);
      out.quantified.push_back(id);
      combined.push_back(id);
      betas.push_back(id);
    }
    ExistentialWrapper compat = compile_compatible_boolean(
        spec.domain, spec.e, spec.e_prime, spec.e_second, m,
        2 * wide - 2);
    embed_property(sys, out.quantified, compat, combined);
    std::vector<int> support = alphas;
    std::vector<long long> coeffs;
    for (int i = 0; i < wide; ++i) {
      coeffs.push_back(block[static_cast<std::size_t>(i)] == 0 ? 1 : -1);
    }
    for (int j = 0; j < wide - 2; ++j) {
      support.push_back(betas[static_cast<std::size_t>(j)]);
      coeffs.push_back(-1);
    }
    emit_linear(sys, support, coeffs, 1LL << m, dirs, "exclusion");
  }
  return out;
}

ExistentialWrapper compile_boolean_permutation(const PropertySpec& spec) {
  const int w = spec.width;
  const int m = spec.m_exponent;
  if (w < 1 || w > 12) {
    throw std::invalid_argument(
        "boolean periodized permutation: width must be in [1, 12]");
  }
  const GroupElement& v = spec.permutation_direction;
  if (v.group != spec.domain) {
    throw std::invalid_argument(
        "boolean periodized permutation: step not in the domain group");
  }
  if (!order_at_least(v, 1LL << w)) {
    throw std::invalid_argument(
        "boolean periodized permutation: step must have order at least 2^W");
  }
  ExistentialWrapper out = compile_compatible_boolean(
      spec.domain, spec.e, spec.e_prime, spec.e_second, m, w);
  FunctionalSystem& sys = out.inner;

  // Row w picks out the parity of component w: (2Z/2^M)^W is the joint
  // kernel of the W scaled unit rows.
  std::vector<std::vector<long long>> rows;
  for (int i = 0; i < w; ++i) {
    std::vector<long long> row(static_cast<std::size_t>(w), 0);
    row[static_cast<std::size_t>(i)] = 1LL << (m - 1);
    rows.push_back(std::move(row));
  }
  FunctionalEquation eq;
  for (int i = 0; i < w; ++i) eq.support.push_back(i);
  eq.label = "permutation";
  for (long long j = 0; j < (1LL << w); ++j) {
    eq.terms.push_back({scale(j, v), kernel_set(rows)});
  }
  append_equation(sys, std::move(eq));
  return out;
}

void require_trailing_quantifiers(const ExistentialWrapper& wrapper,
                                  const char* what) {
  const std::size_t total = wrapper.inner.components.size();
  const std::size_t aux = wrapper.quantified.size();
  std::vector<int> sorted = wrapper.quantified;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < aux; ++i) {
    if (sorted[i] != static_cast<int>(total - aux + i)) {
      throw std::invalid_argument(
          std::string(what) +
          ": quantified components must trail the visible tuple");
    }
  }
}

}  // namespace

ExistentialWrapper compile_property(const PropertySpec& spec) {
  spec.domain.validate();
  switch (spec.kind) {
    case PropertySpec::Kind::kClock: {
      if (spec.modulus < 1) {
        throw std::invalid_argument("clock: modulus must be positive");
      }
      if (spec.direction.group != spec.domain) {
        throw std::invalid_argument("clock: direction not in the domain");
      }
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components = {cyclic_group(spec.modulus)};
      FunctionalEquation eq;
      eq.support = {0};
      eq.label = "clock";
      eq.terms.push_back({spec.direction, explicit_set({{0}})});
      std::vector<std::vector<long long>> rest;
      for (long long v = 0; v < spec.modulus; ++v) {
        if (v != 1 % spec.modulus) rest.push_back({v});
      }
      if (!rest.empty()) {
        eq.terms.push_back({zero_element(spec.domain), explicit_set(rest)});
      }
      append_equation(out.inner, std::move(eq));
      return out;
    }
    case PropertySpec::Kind::kPeriodizedPermutation: {
      if (spec.modulus < 1) {
        throw std::invalid_argument("permutation: modulus must be positive");
      }
      if (spec.direction.group != spec.domain) {
        throw std::invalid_argument("permutation: step not in the domain");
      }
      if (!order_at_least(spec.direction, spec.modulus)) {
        throw std::invalid_argument(
            "permutation: step must have order at least N");
      }
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components = {cyclic_group(spec.modulus)};
      FunctionalEquation eq;
      eq.support = {0};
      eq.label = "periodized-permutation";
      for (long long j = 0; j < spec.modulus; ++j) {
        eq.terms.push_back({scale(j, spec.direction), explicit_set({{0}})});
      }
      append_equation(out.inner, std::move(eq));
      return out;
    }
    case PropertySpec::Kind::kConstantModSubgroup: {
      require_subgroup(spec.subgroup, spec.codomain);
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components = {spec.codomain};
      emit_constancy(out.inner, {0}, spec.subgroup,
                     directions_or_all(spec.domain, spec.directions),
                     "constant-mod-subgroup");
      return out;
    }
    case PropertySpec::Kind::kPeriodic: {
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components = {spec.codomain};
      std::vector<GroupElement> periods = spec.directions;
      for (const auto& v : periods) {
        if (v.group != spec.domain) {
          throw std::invalid_argument("periodic: period not in the domain");
        }
      }
      emit_periodic(out.inner, 0, periods, "periodic");
      return out;
    }
    case PropertySpec::Kind::kLinearConstraint: {
      if (spec.coefficients.empty()) {
        throw std::invalid_argument("linear constraint: no coefficients");
      }
      if (spec.modulus < 1) {
        throw std::invalid_argument("linear constraint: modulus must be "
                                    "positive");
      }
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components.assign(spec.coefficients.size(),
                                  cyclic_group(spec.modulus));
      std::vector<int> support;
      for (std::size_t i = 0; i < spec.coefficients.size(); ++i) {
        support.push_back(static_cast<int>(i));
      }
      emit_linear(out.inner, support, spec.coefficients, spec.modulus,
                  directions_or_all(spec.domain, spec.directions), "linear");
      return out;
    }
    case PropertySpec::Kind::kBoolean: {
      ExistentialWrapper out;
      out.inner.domain = spec.domain;
      out.inner.components = {cyclic_group(1LL << spec.m_exponent)};
      emit_boolean(out.inner, 0, spec.e, spec.m_exponent, "boolean");
      return out;
    }
    case PropertySpec::Kind::kCompatibleBoolean:
      return compile_compatible_boolean(spec.domain, spec.e, spec.e_prime,
                                        spec.e_second, spec.m_exponent,
                                        spec.width);
    case PropertySpec::Kind::kSymmetricBooleanConstraint:
      return compile_symmetric(spec);
    case PropertySpec::Kind::kBooleanPeriodizedPermutation:
      return compile_boolean_permutation(spec);
    case PropertySpec::Kind::kConjunction: {
      if (spec.parts.empty()) {
        throw std::invalid_argument("conjunction: no parts");
      }
      std::vector<ExistentialWrapper> parts;
      for (const auto& p : spec.parts) {
        if (p.domain != spec.domain) {
          throw std::invalid_argument("conjunction: domain mismatch");
        }
        parts.push_back(compile_property(p));
      }
      return conjoin_wrappers(parts);
    }
  }
  throw std::logic_error("compile_property: unknown kind");
}

std::vector<int> embed_property(FunctionalSystem& target,
                                std::vector<int>& target_quantified,
                                const ExistentialWrapper& inner,
                                const std::vector<int>& main_map) {
  if (inner.inner.domain != target.domain) {
    throw std::invalid_argument("embed: domain mismatch");
  }
  std::vector<char> is_aux(inner.inner.components.size(), 0);
  for (int w : inner.quantified) {
    if (w < 0 || w >= static_cast<int>(inner.inner.components.size())) {
      throw std::invalid_argument("embed: quantified id out of range");
    }
    is_aux[static_cast<std::size_t>(w)] = 1;
  }
  std::vector<int> full_map(inner.inner.components.size(), -1);
  std::size_t visible = 0;
  for (std::size_t w = 0; w < inner.inner.components.size(); ++w) {
    if (is_aux[w]) continue;
    if (visible >= main_map.size()) {
      throw std::invalid_argument("embed: main map too short");
    }
    const int tgt = main_map[visible++];
    if (tgt < 0 || tgt >= static_cast<int>(target.components.size())) {
      throw std::invalid_argument("embed: mapped id out of range");
    }
    if (target.components[static_cast<std::size_t>(tgt)] !=
        inner.inner.components[w]) {
      throw std::invalid_argument("embed: component codomain mismatch");
    }
    full_map[w] = tgt;
  }
  if (visible != main_map.size()) {
    throw std::invalid_argument("embed: main map too long");
  }
  std::vector<int> fresh;
  for (int w : inner.quantified) {
    const int id = static_cast<int>(target.components.size());
    target.components.push_back(
        inner.inner.components[static_cast<std::size_t>(w)]);
    target_quantified.push_back(id);
    full_map[static_cast<std::size_t>(w)] = id;
    fresh.push_back(id);
  }

  for (const auto& eq : inner.inner.equations) {
    FunctionalEquation mapped;
    mapped.label = eq.label;
    // Remapped support ids must be re-sorted, and the coordinate blocks
    // of every tuple and kernel row permuted the same way.
    std::vector<std::size_t> perm(eq.support.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::vector<int> mapped_ids(eq.support.size());
    for (std::size_t i = 0; i < eq.support.size(); ++i) {
      mapped_ids[i] = full_map[static_cast<std::size_t>(eq.support[i])];
    }
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return mapped_ids[a] < mapped_ids[b];
    });
    for (std::size_t i = 0; i < perm.size(); ++i) {
      mapped.support.push_back(mapped_ids[perm[i]]);
    }
    // Coordinate permutation: old concatenated position -> new position.
    std::vector<std::size_t> block_len(eq.support.size());
    std::vector<std::size_t> block_off(eq.support.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < eq.support.size(); ++i) {
      block_off[i] = total;
      block_len[i] =
          inner.inner.components[static_cast<std::size_t>(eq.support[i])]
              .torsion_orders.size();
      total += block_len[i];
    }
    std::vector<std::size_t> source(total);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t k = 0; k < block_len[perm[i]]; ++k) {
        source[pos++] = block_off[perm[i]] + k;
      }
    }
    auto permute = [&](const std::vector<long long>& v) {
      std::vector<long long> out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[source[i]];
      return out;
    };
    for (const auto& term : eq.terms) {
      SetExpr set;
      set.kind = term.set.kind;
      if (set.kind == SetExpr::Kind::kExplicit) {
        std::vector<std::vector<long long>> values;
        for (const auto& v : term.set.values) values.push_back(permute(v));
        set = explicit_set(std::move(values));
      } else {
        for (const auto& r : term.set.kernel_rows) {
          set.kernel_rows.push_back(permute(r));
        }
      }
      mapped.terms.push_back({term.shift, std::move(set)});
    }
    append_equation(target, std::move(mapped));
  }
  return fresh;
}

ExistentialWrapper lift_wrapper(const ExistentialWrapper& wrapper,
                                const std::vector<GroupSpec>& new_components,
                                const std::vector<int>& main_map) {
  ExistentialWrapper out;
  out.inner.domain = wrapper.inner.domain;
  out.inner.components = new_components;
  embed_property(out.inner, out.quantified, wrapper, main_map);
  return out;
}

ExistentialWrapper pullback_wrapper(
    const ExistentialWrapper& wrapper, const GroupSpec& new_domain,
    const std::vector<GroupElement>& generator_images) {
  new_domain.validate();
  const GroupSpec& old = wrapper.inner.domain;
  if (static_cast<int>(generator_images.size()) != old.rank()) {
    throw std::invalid_argument(
        "pullback: one image per domain generator required");
  }
  for (const auto& img : generator_images) {
    if (img.group != new_domain) {
      throw std::invalid_argument("pullback: image not in the new domain");
    }
  }
  for (std::size_t i = 0; i < old.torsion_orders.size(); ++i) {
    const auto& img =
        generator_images[static_cast<std::size_t>(old.free_rank) + i];
    if (scale(old.torsion_orders[i], img) != zero_element(new_domain)) {
      throw std::invalid_argument(
          "pullback: image order incompatible with the torsion generator");
    }
  }
  auto map_shift = [&](const GroupElement& h) {
    GroupElement out = zero_element(new_domain);
    for (int i = 0; i < old.rank(); ++i) {
      out = add(out, scale(h.coords[static_cast<std::size_t>(i)],
                           generator_images[static_cast<std::size_t>(i)]));
    }
    return out;
  };
  ExistentialWrapper out;
  out.inner.domain = new_domain;
  out.inner.components = wrapper.inner.components;
  out.quantified = wrapper.quantified;
  for (const auto& eq : wrapper.inner.equations) {
    FunctionalEquation mapped;
    mapped.support = eq.support;
    mapped.label = eq.label;
    for (const auto& term : eq.terms) {
      mapped.terms.push_back({map_shift(term.shift), term.set});
    }
    append_equation(out.inner, std::move(mapped));
  }
  return out;
}

ExistentialWrapper conjoin_wrappers(
    const std::vector<ExistentialWrapper>& wrappers) {
  if (wrappers.empty()) {
    throw std::invalid_argument("conjoin: no wrappers");
  }
  for (const auto& w : wrappers) {
    require_trailing_quantifiers(w, "conjoin");
  }
  const auto& first = wrappers.front();
  const std::size_t visible =
      first.inner.components.size() - first.quantified.size();
  ExistentialWrapper out;
  out.inner.domain = first.inner.domain;
  out.inner.components.assign(first.inner.components.begin(),
                              first.inner.components.begin() +
                                  static_cast<long>(visible));
  std::vector<int> identity;
  for (std::size_t i = 0; i < visible; ++i) {
    identity.push_back(static_cast<int>(i));
  }
  for (const auto& w : wrappers) {
    if (w.inner.domain != out.inner.domain ||
        w.inner.components.size() - w.quantified.size() != visible) {
      throw std::invalid_argument(
          "conjoin: wrappers must share the visible tuple");
    }
    for (std::size_t i = 0; i < visible; ++i) {
      if (w.inner.components[i] != out.inner.components[i]) {
        throw std::invalid_argument(
            "conjoin: wrappers must share the visible tuple");
      }
    }
    embed_property(out.inner, out.quantified, w, identity);
  }
  return out;
}

TilingSystem functional_to_tiling(const FunctionalSystem& system) {
  system.domain.validate();
  Bigint h_big(1);
  std::vector<long long> h_coords;
  std::vector<std::size_t> comp_offset;
  for (const auto& comp : system.components) {
    if (!comp.is_finite()) {
      throw std::domain_error("functional_to_tiling: finite codomains "
                              "required");
    }
    comp_offset.push_back(h_coords.size());
    for (long long t : comp.torsion_orders) {
      h_coords.push_back(t);
      h_big = h_big * Bigint(t);
    }
  }
  if (h_big > Bigint(1LL << 20)) {
    throw std::length_error(
        "functional_to_tiling: product codomain exceeds 2^20 elements");
  }
  const long long h_order = h_big.to_int64();
  GroupSpec gh;
  gh.free_rank = system.domain.free_rank;
  gh.torsion_orders = system.domain.torsion_orders;
  gh.torsion_orders.insert(gh.torsion_orders.end(), h_coords.begin(),
                           h_coords.end());
  const GroupSpec h_all{0, h_coords};
  const std::size_t drank = static_cast<std::size_t>(system.domain.rank());

  auto lift = [&](const std::vector<long long>& domain_coords,
                  const std::vector<long long>& h_tuple) {
    std::vector<long long> coords(domain_coords);
    coords.insert(coords.end(), h_tuple.begin(), h_tuple.end());
    return make_element(gh, std::move(coords));
  };

  std::vector<Tile> tiles;
  {
    std::vector<GroupElement> graph_column;
    const std::vector<long long> zero(drank, 0);
    for (long long t = 0; t < h_order; ++t) {
      graph_column.push_back(lift(zero, coords_at(h_all, t)));
    }
    tiles.push_back(make_tile(gh, std::move(graph_column)));
  }

  for (const auto& eq : system.equations) {
    FunctionalSystem shell{system.domain, system.components, {}};
    append_equation(shell, eq);  // validates the shape
    const GroupSpec hu = support_codomain(system.components, eq.support);
    // Cylinder factor: the components outside the support.
    std::vector<int> rest;
    for (int w = 0; w < static_cast<int>(system.components.size()); ++w) {
      if (!std::binary_search(eq.support.begin(), eq.support.end(), w)) {
        rest.push_back(w);
      }
    }
    const GroupSpec rest_spec = support_codomain(system.components, rest);
    const long long rest_order = group_order(rest_spec);
    std::set<std::vector<long long>> elems;
    for (const auto& term : eq.terms) {
      const auto tuples = materialize(term.set, hu);
      const GroupElement base = negate(term.shift);
      for (const auto& tuple : tuples) {
        for (long long r = 0; r < rest_order; ++r) {
          const auto rest_tuple = coords_at(rest_spec, r);
          std::vector<long long> h_tuple(h_coords.size(), 0);
          std::size_t pos = 0;
          for (std::size_t p = 0; p < eq.support.size(); ++p) {
            const auto& comp =
                system.components[static_cast<std::size_t>(eq.support[p])];
            const std::size_t off =
                comp_offset[static_cast<std::size_t>(eq.support[p])];
            for (std::size_t k = 0; k < comp.torsion_orders.size(); ++k) {
              h_tuple[off + k] = tuple[pos++];
            }
          }
          pos = 0;
          for (std::size_t p = 0; p < rest.size(); ++p) {
            const auto& comp =
                system.components[static_cast<std::size_t>(rest[p])];
            const std::size_t off =
                comp_offset[static_cast<std::size_t>(rest[p])];
            for (std::size_t k = 0; k < comp.torsion_orders.size(); ++k) {
              h_tuple[off + k] = rest_tuple[pos++];
            }
          }
          GroupElement el = lift(base.coords, h_tuple);
          if (!elems.insert(el.coords).second) {
            throw std::invalid_argument(
                "functional_to_tiling: equation terms collide");
          }
          if (static_cast<long long>(elems.size()) > (1LL << 22)) {
            throw std::length_error(
                "functional_to_tiling: tile exceeds 2^22 elements");
          }
        }
      }
    }
    std::vector<GroupElement> elements;
    elements.reserve(elems.size());
    for (const auto& coords : elems) {
      elements.push_back(make_element(gh, coords));
    }
    tiles.push_back(make_tile(gh, std::move(elements)));
  }
  return TilingSystem{gh, std::move(tiles)};
}

}  // namespace forge
