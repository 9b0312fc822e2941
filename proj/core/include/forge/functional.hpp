#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "forge/group.hpp"
#include "forge/tiling.hpp"

namespace forge {

/**
 * A subset of a finite abelian product codomain, stored either as an
 * explicit sorted list of coordinate tuples or symbolically as the kernel
 * (or complement of the kernel) of integer linear forms.  Kernel rows are
 * one coefficient per codomain coordinate; a tuple a lies in the kernel
 * when every row satisfies sum_t c_t a_t = 0 modulo the common coordinate
 * order.  Kernel kinds therefore require all coordinate orders equal.
 */
struct SetExpr {
  enum class Kind { kExplicit, kKernel, kKernelComplement };
  Kind kind = Kind::kExplicit;
  std::vector<std::vector<long long>> values;       // kExplicit, sorted
  std::vector<std::vector<long long>> kernel_rows;  // kernel kinds
};

SetExpr explicit_set(std::vector<std::vector<long long>> values);
SetExpr kernel_set(std::vector<std::vector<long long>> rows);
SetExpr kernel_complement_set(std::vector<std::vector<long long>> rows);

/** One translated-set term alpha_U(x + shift) + set of an equation. */
struct EquationTerm {
  GroupElement shift;
  SetExpr set;
};

/**
 * A functional equation over a tuple of functions alpha_w : G -> H_w:
 *
 *   disjoint-union over terms of (alpha_U(x + h_j) + E_j)  =  H_U
 *
 * for all x in G, where U is the sorted support (component ids), alpha_U
 * is the tuple of the supported components and H_U their product.  An
 * equation constrains components outside its support not at all, which
 * makes lifting a system to a larger tuple the identity on equations.
 */
struct FunctionalEquation {
  std::vector<int> support;
  std::vector<EquationTerm> terms;
  std::string label;
};

struct FunctionalSystem {
  GroupSpec domain;
  std::vector<GroupSpec> components;  // finite codomains H_w
  std::vector<FunctionalEquation> equations;
};

/**
 * A weakly expressible property: the inner system mentions the visible
 * components plus existentially quantified auxiliary ones (listed in
 * `quantified`).  A strongly expressible property is the special case of
 * an empty quantifier list.
 */
struct ExistentialWrapper {
  FunctionalSystem inner;
  std::vector<int> quantified;
};

/** Product codomain of the supported components, as one finite group. */
GroupSpec support_codomain(const std::vector<GroupSpec>& components,
                           const std::vector<int>& support);

/** Dense index of a finite-group element (row-major over coordinates). */
long long dense_index(const GroupSpec& finite_group,
                      const std::vector<long long>& coords);

/** Inverse of dense_index. */
std::vector<long long> coords_at(const GroupSpec& finite_group,
                                 long long index);

/** Number of elements of a finite group (throws if infinite). */
long long group_order(const GroupSpec& finite_group);

/** Membership of a coordinate tuple in a set expression. */
bool set_contains(const SetExpr& set, const GroupSpec& codomain,
                  const std::vector<long long>& tuple);

/**
 * Explicit sorted element list of a set expression; kernel kinds are
 * expanded by scanning the codomain, which is refused above 4096 elements
 * (std::length_error).
 */
std::vector<std::vector<long long>> materialize(const SetExpr& set,
                                                const GroupSpec& codomain);

/**
 * Appends an equation unless an identical one (up to term order) is
 * already present; terms are canonicalized by sorting.
 */
void append_equation(FunctionalSystem& system, FunctionalEquation equation);

/**
 * A tuple of component functions given by value tables on the finite
 * quotient G/Lambda: values[w][cell] is the dense index of alpha_w at the
 * cell's canonical representative.  Quotient cells are ordered as in
 * Quotient(domain, lattice).
 */
struct FunctionFamily {
  GroupSpec domain;
  PeriodLattice lattice;
  std::vector<GroupSpec> components;
  std::vector<std::vector<long long>> values;
};

/**
 * Checks one equation against a family at every cell of the quotient.
 * Equations whose support product exceeds 4096 elements are checked by
 * kernel fast paths (all terms one shared kernel, or a kernel/complement
 * pair); other oversized shapes raise std::invalid_argument.
 */
bool check_equation(const FunctionFamily& family,
                    const FunctionalEquation& equation);

struct SystemCheckReport {
  bool holds = true;
  int failed_equation = -1;   // index into system.equations
  std::string failed_label;
};

SystemCheckReport check_system(const FunctionFamily& family,
                               const FunctionalSystem& system);

struct WeakCheckOptions {
  long long node_cap = 1LL << 20;  // search nodes before giving up
};

struct WeakCheckResult {
  bool satisfiable = false;
  long long nodes_visited = 0;
  // One value table per quantified component (in wrapper order).
  std::vector<std::vector<long long>> witness;
};

/**
 * Decides whether the visible tuple extends to a full solution of the
 * wrapper's inner system by assigning the quantified components.  `given`
 * must carry value tables for every non-quantified component (entries for
 * quantified ids are ignored).  Backtracking search with forward checking:
 * instances with one unknown filter that unknown's domain, instances with
 * none are checked, branching picks a smallest domain.  Exceeding the
 * node cap raises std::length_error.
 */
WeakCheckResult check_weak_property(const ExistentialWrapper& wrapper,
                                    const FunctionFamily& given,
                                    const WeakCheckOptions& options = {});

/**
 * Exhaustive verification of the pair-compatibility forcing argument in
 * Z/2^M Z: for every five pairs {a,b}, {c,d}, {f,g}, {h',k'}, {h'',k''}
 * of opposite-parity elements and every z with
 *     (a+b) + (h'+k') + (h''+k'') = 2(c+d) + (f+g) + 2z,
 * if every triple in {a,b} x {h',k'} x {h'',k''} can be written as
 * 2*beta + gamma + z with (beta, gamma) in {c,d} x {f,g}, then
 * {a,b}, {h',k'}, {h''k''} are translates of each other.  Returns true
 * iff no counterexample exists.  M < 2 raises std::invalid_argument.
 */
bool verify_force_compat(int m_exponent);

/** Tagged union describing a property from the built-in library. */
struct PropertySpec {
  enum class Kind {
    kClock,
    kPeriodizedPermutation,
    kConstantModSubgroup,
    kPeriodic,
    kLinearConstraint,
    kBoolean,
    kCompatibleBoolean,
    kSymmetricBooleanConstraint,
    kBooleanPeriodizedPermutation,
    kConjunction,
  };
  Kind kind = Kind::kClock;
  GroupSpec domain;

  long long modulus = 0;        // Clock / PeriodizedPermutation / LinearConstraint N
  GroupElement direction;       // Clock direction or permutation step
  GroupSpec codomain;           // ConstantModSubgroup / Periodic target H
  SetExpr subgroup;             // ConstantModSubgroup H'
  std::vector<GroupElement> directions;  // constancy/periodicity directions;
                                         // empty means all standard generators
  std::vector<long long> coefficients;   // LinearConstraint

  GroupElement e, e_prime, e_second;     // boolean machinery parameters
  int m_exponent = 0;                    // M in Z/2^M Z
  int width = 0;                         // W
  GroupElement permutation_direction;    // BooleanPeriodizedPermutation v
  std::function<bool(const std::vector<int>&)> omega;  // symmetric predicate
  long long omega_cap = 4096;            // max exclusion blocks

  std::vector<PropertySpec> parts;       // Conjunction
};

/**
 * Compiles a library property to a system with optional existential
 * components.  Strongly expressible entries return an empty quantifier
 * list.  Parameter violations raise std::invalid_argument quoting the
 * broken constraint (e.g. "2^M <= 2W+4").
 */
ExistentialWrapper compile_property(const PropertySpec& spec);

/**
 * Embeds `inner` into `target`: inner's visible components map through
 * `main_map` (visible id -> target id), quantified components get fresh
 * target components appended and recorded in target_quantified.  Returns
 * the target ids assigned to inner's quantified components.  This is the
 * lift-and-relabel step used by every composite construction.
 */
std::vector<int> embed_property(FunctionalSystem& target,
                                std::vector<int>& target_quantified,
                                const ExistentialWrapper& inner,
                                const std::vector<int>& main_map);

/**
 * Lift to a wider visible tuple: visible component w of the wrapper
 * becomes main_map[w] among `new_components`.  Quantified components are
 * re-appended after the new visible tuple.
 */
ExistentialWrapper lift_wrapper(const ExistentialWrapper& wrapper,
                                const std::vector<GroupSpec>& new_components,
                                const std::vector<int>& main_map);

/**
 * Pullback along the homomorphism G_new -> G_old ... shifts of the old
 * domain are replaced by their images: a shift with coordinates (c_i) maps
 * to sum_i c_i * generator_images[i] in the new domain.  The wrapper's
 * equations are otherwise unchanged.
 */
ExistentialWrapper pullback_wrapper(const ExistentialWrapper& wrapper,
                                    const GroupSpec& new_domain,
                                    const std::vector<GroupElement>& generator_images);

/**
 * Conjunction of wrappers over the same visible components; auxiliary
 * components are relabelled disjointly.
 */
ExistentialWrapper conjoin_wrappers(const std::vector<ExistentialWrapper>& wrappers);

/**
 * Compiles a functional system to a tiling system over G x H, H the full
 * product of all components: one vertical-line tile {0} x H forcing
 * solutions to be graphs, plus per equation the tile formed by placing
 * each term's (cylinder-lifted) set at the negated shift.  Terms that
 * collide inside one tile raise std::invalid_argument; a product codomain
 * larger than 2^20 raises std::length_error.
 */
TilingSystem functional_to_tiling(const FunctionalSystem& system);

}  // namespace forge
