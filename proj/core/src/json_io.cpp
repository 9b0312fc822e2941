#include "forge/json_io.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "json.hpp"

namespace forge {

namespace {

using Json = nlohmann::ordered_json;

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/** A node plus the context needed for schema error messages. */
struct Cur {
  const Json* node;
  const std::string* file;
  std::string path;

  [[noreturn]] void fail(const std::string& expected) const {
    throw JsonSchemaError(*file, path.empty() ? "/" : path, expected);
  }

  const Json& obj(const std::string& what) const {
    if (!node->is_object()) fail("object (" + what + ")");
    return *node;
  }

  Cur at(const char* key, const std::string& what) const {
    const Json& o = obj(what);
    auto it = o.find(key);
    if (it == o.end()) {
      fail("member \"" + std::string(key) + "\" (" + what + ")");
    }
    return Cur{&*it, file, path + "/" + key};
  }

  std::optional<Cur> maybe(const char* key) const {
    if (!node->is_object()) return std::nullopt;
    auto it = node->find(key);
    if (it == node->end()) return std::nullopt;
    return Cur{&*it, file, path + "/" + key};
  }

  const Json& arr(const std::string& what) const {
    if (!node->is_array()) fail("array (" + what + ")");
    return *node;
  }

  Cur idx(std::size_t i) const {
    return Cur{&(*node)[i], file, path + "/" + std::to_string(i)};
  }

  long long as_int(const std::string& what) const {
    if (!node->is_number_integer()) fail("integer (" + what + ")");
    return node->get<long long>();
  }

  std::string as_str(const std::string& what) const {
    if (!node->is_string()) fail("string (" + what + ")");
    return node->get<std::string>();
  }

  std::vector<long long> int_array(const std::string& what) const {
    const Json& a = arr(what);
    std::vector<long long> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.push_back(idx(i).as_int(what + " entry"));
    }
    return out;
  }

  std::vector<std::vector<long long>> int_matrix(
      const std::string& what) const {
    const Json& a = arr(what);
    std::vector<std::vector<long long>> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.push_back(idx(i).int_array(what + " row"));
    }
    return out;
  }
};

Json parse_text(const std::string& text, const std::string& file) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw JsonSchemaError(file, "/", std::string("valid JSON (") + e.what() +
                                         ")");
  }
}

// ---------------------------------------------------------------- groups

Json group_json(const GroupSpec& g) {
  Json j;
  j["free_rank"] = g.free_rank;
  j["torsion"] = g.torsion_orders;
  return j;
}

GroupSpec group_at(const Cur& c) {
  GroupSpec g;
  g.free_rank =
      static_cast<int>(c.at("free_rank", "group").as_int("free rank"));
  g.torsion_orders = c.at("torsion", "group").int_array("torsion orders");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("well-formed group (") + e.what() + ")");
  }
  return g;
}

Json element_json(const GroupElement& e) { return Json(e.coords); }

GroupElement element_at(const Cur& c, const GroupSpec& g) {
  std::vector<long long> coords = c.int_array("element coordinates");
  if (static_cast<int>(coords.size()) != g.rank()) {
    c.fail("array of " + std::to_string(g.rank()) + " integers (element of " +
           g.to_string() + ")");
  }
  return make_element(g, std::move(coords));
}

std::vector<GroupElement> element_list_at(const Cur& c, const GroupSpec& g,
                                          const std::string& what) {
  const Json& a = c.arr(what);
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(element_at(c.idx(i), g));
  }
  return out;
}

// ----------------------------------------------------------------- tiles

Json tile_elements_json(const Tile& tile) {
  Json a = Json::array();
  for (const GroupElement& e : tile.elements) a.push_back(element_json(e));
  return a;
}

Tile tile_at(const Cur& c, const GroupSpec& g, const std::string& what) {
  std::vector<GroupElement> elements = element_list_at(c, g, what);
  try {
    return make_tile(g, std::move(elements));
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("valid tile (") + e.what() + ")");
  }
}

// ------------------------------------------------------- set expressions

Json set_expr_json(const SetExpr& set) {
  Json j;
  switch (set.kind) {
    case SetExpr::Kind::kExplicit:
      j["kind"] = "explicit";
      j["values"] = set.values;
      break;
    case SetExpr::Kind::kKernel:
      j["kind"] = "kernel";
      j["rows"] = set.kernel_rows;
      break;
    case SetExpr::Kind::kKernelComplement:
      j["kind"] = "kernel-complement";
      j["rows"] = set.kernel_rows;
      break;
  }
  return j;
}

SetExpr set_expr_at(const Cur& c) {
  const std::string kind = c.at("kind", "set expression").as_str("set kind");
  try {
    if (kind == "explicit") {
      return explicit_set(
          c.at("values", "explicit set").int_matrix("set values"));
    }
    if (kind == "kernel") {
      return kernel_set(c.at("rows", "kernel set").int_matrix("kernel rows"));
    }
    if (kind == "kernel-complement") {
      return kernel_complement_set(
          c.at("rows", "kernel set").int_matrix("kernel rows"));
    }
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("valid set expression (") + e.what() + ")");
  }
  c.fail("set kind \"explicit\", \"kernel\" or \"kernel-complement\"");
}

// ---------------------------------------------------- functional systems

Json functional_system_json(const FunctionalSystem& system) {
  Json j;
  j["domain"] = group_json(system.domain);
  Json comps = Json::array();
  for (const GroupSpec& g : system.components) comps.push_back(group_json(g));
  j["components"] = std::move(comps);
  Json eqs = Json::array();
  for (const FunctionalEquation& eq : system.equations) {
    Json je;
    je["support"] = eq.support;
    je["label"] = eq.label;
    Json terms = Json::array();
    for (const EquationTerm& term : eq.terms) {
      Json jt;
      jt["shift"] = element_json(term.shift);
      jt["set"] = set_expr_json(term.set);
      terms.push_back(std::move(jt));
    }
    je["terms"] = std::move(terms);
    eqs.push_back(std::move(je));
  }
  j["equations"] = std::move(eqs);
  return j;
}

FunctionalSystem functional_system_at(const Cur& c) {
  FunctionalSystem out;
  out.domain = group_at(c.at("domain", "functional system"));
  {
    Cur comps = c.at("components", "functional system");
    const Json& a = comps.arr("component list");
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.components.push_back(group_at(comps.idx(i)));
    }
  }
  Cur eqs = c.at("equations", "functional system");
  const Json& ea = eqs.arr("equation list");
  for (std::size_t i = 0; i < ea.size(); ++i) {
    Cur ce = eqs.idx(i);
    FunctionalEquation eq;
    for (long long s : ce.at("support", "equation").int_array("support")) {
      if (s < 0 || s >= static_cast<long long>(out.components.size())) {
        ce.fail("support ids below " +
                std::to_string(out.components.size()) + " (equation)");
      }
      eq.support.push_back(static_cast<int>(s));
    }
    if (auto label = ce.maybe("label")) {
      eq.label = label->as_str("equation label");
    }
    Cur terms = ce.at("terms", "equation");
    const Json& ta = terms.arr("term list");
    for (std::size_t t = 0; t < ta.size(); ++t) {
      Cur ct = terms.idx(t);
      EquationTerm term;
      term.shift = element_at(ct.at("shift", "term"), out.domain);
      term.set = set_expr_at(ct.at("set", "term"));
      eq.terms.push_back(std::move(term));
    }
    out.equations.push_back(std::move(eq));
  }
  return out;
}

// ----------------------------------------------------------- properties

const char* kind_name(PropertySpec::Kind kind) {
  switch (kind) {
    case PropertySpec::Kind::kClock: return "clock";
    case PropertySpec::Kind::kPeriodizedPermutation:
      return "periodized-permutation";
    case PropertySpec::Kind::kConstantModSubgroup:
      return "constant-mod-subgroup";
    case PropertySpec::Kind::kPeriodic: return "periodic";
    case PropertySpec::Kind::kLinearConstraint: return "linear-constraint";
    case PropertySpec::Kind::kBoolean: return "boolean";
    case PropertySpec::Kind::kCompatibleBoolean: return "compatible-boolean";
    case PropertySpec::Kind::kSymmetricBooleanConstraint:
      return "symmetric-boolean-constraint";
    case PropertySpec::Kind::kBooleanPeriodizedPermutation:
      return "boolean-periodized-permutation";
    case PropertySpec::Kind::kConjunction: return "conjunction";
  }
  return "?";
}

Json property_json(const PropertySpec& spec,
                   const std::optional<std::vector<std::string>>& omega_words);

PropertySpec property_at(const Cur& c);

Json property_json(const PropertySpec& spec,
                   const std::optional<std::vector<std::string>>& omega_words) {
  Json j;
  j["kind"] = kind_name(spec.kind);
  j["domain"] = group_json(spec.domain);
  switch (spec.kind) {
    case PropertySpec::Kind::kClock:
    case PropertySpec::Kind::kPeriodizedPermutation:
      j["modulus"] = spec.modulus;
      j["direction"] = element_json(spec.direction);
      break;
    case PropertySpec::Kind::kConstantModSubgroup:
      j["codomain"] = group_json(spec.codomain);
      j["subgroup"] = set_expr_json(spec.subgroup);
      if (!spec.directions.empty()) {
        Json dirs = Json::array();
        for (const GroupElement& d : spec.directions) {
          dirs.push_back(element_json(d));
        }
        j["directions"] = std::move(dirs);
      }
      break;
    case PropertySpec::Kind::kPeriodic: {
      j["codomain"] = group_json(spec.codomain);
      Json dirs = Json::array();
      for (const GroupElement& d : spec.directions) {
        dirs.push_back(element_json(d));
      }
      j["directions"] = std::move(dirs);
      break;
    }
    case PropertySpec::Kind::kLinearConstraint: {
      j["modulus"] = spec.modulus;
      j["coefficients"] = spec.coefficients;
      if (!spec.directions.empty()) {
        Json dirs = Json::array();
        for (const GroupElement& d : spec.directions) {
          dirs.push_back(element_json(d));
        }
        j["directions"] = std::move(dirs);
      }
      break;
    }
    case PropertySpec::Kind::kBoolean:
      j["e"] = element_json(spec.e);
      j["m_exponent"] = spec.m_exponent;
      break;
    case PropertySpec::Kind::kCompatibleBoolean:
      j["e"] = element_json(spec.e);
      j["e_prime"] = element_json(spec.e_prime);
      j["e_second"] = element_json(spec.e_second);
      j["m_exponent"] = spec.m_exponent;
      j["width"] = spec.width;
      break;
    case PropertySpec::Kind::kSymmetricBooleanConstraint:
      j["e"] = element_json(spec.e);
      j["e_prime"] = element_json(spec.e_prime);
      j["e_second"] = element_json(spec.e_second);
      j["m_exponent"] = spec.m_exponent;
      j["width"] = spec.width;
      if (omega_words) {
        j["omega"] = *omega_words;
      } else {
        j["omega"] = "all";
      }
      j["omega_cap"] = spec.omega_cap;
      break;
    case PropertySpec::Kind::kBooleanPeriodizedPermutation:
      j["e"] = element_json(spec.e);
      j["e_prime"] = element_json(spec.e_prime);
      j["e_second"] = element_json(spec.e_second);
      j["m_exponent"] = spec.m_exponent;
      j["width"] = spec.width;
      j["permutation_direction"] = element_json(spec.permutation_direction);
      break;
    case PropertySpec::Kind::kConjunction: {
      Json parts = Json::array();
      for (const PropertySpec& part : spec.parts) {
        parts.push_back(property_json(part, std::nullopt));
      }
      j["parts"] = std::move(parts);
      break;
    }
  }
  return j;
}

PropertySpec property_at(const Cur& c) {
  PropertySpec spec;
  const std::string kind = c.at("kind", "property").as_str("property kind");
  spec.domain = group_at(c.at("domain", "property"));
  auto direction = [&](const char* key) {
    return element_at(c.at(key, "property"), spec.domain);
  };
  auto directions = [&]() {
    if (auto dirs = c.maybe("directions")) {
      spec.directions =
          element_list_at(*dirs, spec.domain, "direction list");
    }
  };
  if (kind == "clock" || kind == "periodized-permutation") {
    spec.kind = kind == "clock" ? PropertySpec::Kind::kClock
                                : PropertySpec::Kind::kPeriodizedPermutation;
    spec.modulus = c.at("modulus", "property").as_int("modulus");
    spec.direction = direction("direction");
    return spec;
  }
  if (kind == "constant-mod-subgroup") {
    spec.kind = PropertySpec::Kind::kConstantModSubgroup;
    spec.codomain = group_at(c.at("codomain", "property"));
    spec.subgroup = set_expr_at(c.at("subgroup", "property"));
    directions();
    return spec;
  }
  if (kind == "periodic") {
    spec.kind = PropertySpec::Kind::kPeriodic;
    spec.codomain = group_at(c.at("codomain", "property"));
    spec.directions = element_list_at(c.at("directions", "property"),
                                      spec.domain, "direction list");
    return spec;
  }
  if (kind == "linear-constraint") {
    spec.kind = PropertySpec::Kind::kLinearConstraint;
    spec.modulus = c.at("modulus", "property").as_int("modulus");
    spec.coefficients =
        c.at("coefficients", "property").int_array("coefficients");
    directions();
    return spec;
  }
  if (kind == "boolean") {
    spec.kind = PropertySpec::Kind::kBoolean;
    spec.e = direction("e");
    spec.m_exponent =
        static_cast<int>(c.at("m_exponent", "property").as_int("M"));
    return spec;
  }
  if (kind == "compatible-boolean" ||
      kind == "symmetric-boolean-constraint" ||
      kind == "boolean-periodized-permutation") {
    spec.e = direction("e");
    spec.e_prime = direction("e_prime");
    spec.e_second = direction("e_second");
    spec.m_exponent =
        static_cast<int>(c.at("m_exponent", "property").as_int("M"));
    spec.width = static_cast<int>(c.at("width", "property").as_int("width"));
    if (kind == "compatible-boolean") {
      spec.kind = PropertySpec::Kind::kCompatibleBoolean;
      return spec;
    }
    if (kind == "boolean-periodized-permutation") {
      spec.kind = PropertySpec::Kind::kBooleanPeriodizedPermutation;
      spec.permutation_direction = direction("permutation_direction");
      return spec;
    }
    spec.kind = PropertySpec::Kind::kSymmetricBooleanConstraint;
    if (auto cap = c.maybe("omega_cap")) {
      spec.omega_cap = cap->as_int("omega cap");
    }
    Cur omega = c.at("omega", "property");
    if (omega.node->is_string()) {
      if (omega.as_str("omega") != "all") {
        omega.fail("\"all\" or an array of 0/1 words (omega)");
      }
      spec.omega = [](const std::vector<int>&) { return true; };
      return spec;
    }
    const Json& words = omega.arr("accepted word list (omega)");
    auto accepted = std::make_shared<std::set<std::string>>();
    for (std::size_t i = 0; i < words.size(); ++i) {
      const std::string word = omega.idx(i).as_str("omega word");
      for (char ch : word) {
        if (ch != '0' && ch != '1') {
          omega.idx(i).fail("word of 0/1 characters (omega)");
        }
      }
      accepted->insert(word);
    }
    spec.omega = [accepted](const std::vector<int>& word) {
      std::string key;
      key.reserve(word.size());
      for (int bit : word) key += bit ? '1' : '0';
      return accepted->count(key) != 0;
    };
    return spec;
  }
  if (kind == "conjunction") {
    spec.kind = PropertySpec::Kind::kConjunction;
    Cur parts = c.at("parts", "property");
    const Json& pa = parts.arr("conjunction parts");
    for (std::size_t i = 0; i < pa.size(); ++i) {
      spec.parts.push_back(property_at(parts.idx(i)));
    }
    return spec;
  }
  c.fail(
      "property kind among clock, periodized-permutation, "
      "constant-mod-subgroup, periodic, linear-constraint, boolean, "
      "compatible-boolean, symmetric-boolean-constraint, "
      "boolean-periodized-permutation, conjunction");
}

// -------------------------------------------------------------- hex rows

std::string hex_row(const BetaTuple& beta, int a, int b, long long n,
                    long long j) {
  const long long extent = beta.i_extent();
  const long long bytes = (extent + 7) / 8;
  std::string out;
  for (long long byte = 0; byte < bytes; ++byte) {
    int value = 0;
    for (int bit = 0; bit < 8; ++bit) {
      const long long k = byte * 8 + bit;
      if (k >= extent) break;
      value |= beta.bit(a, b, n, beta.i_lo + k, j) << bit;
    }
    out += "0123456789abcdef"[value >> 4];
    out += "0123456789abcdef"[value & 15];
  }
  return out;
}

void fill_row(BetaTuple& beta, const Cur& where, const std::string& hex,
              int a, int b, long long n, long long j) {
  const long long extent = beta.i_extent();
  const long long bytes = (extent + 7) / 8;
  if (static_cast<long long>(hex.size()) != 2 * bytes) {
    where.fail(std::to_string(2 * bytes) + " hex characters (row of " +
               std::to_string(extent) + " bits)");
  }
  auto nibble = [&](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    where.fail("hexadecimal characters (row)");
  };
  for (long long byte = 0; byte < bytes; ++byte) {
    const int value = nibble(hex[static_cast<std::size_t>(2 * byte)]) * 16 +
                      nibble(hex[static_cast<std::size_t>(2 * byte + 1)]);
    for (int bit = 0; bit < 8; ++bit) {
      const long long k = byte * 8 + bit;
      if (k >= extent) {
        if (value >> bit & 1) {
          where.fail("zero padding bits past the i range (row)");
        }
        continue;
      }
      beta.set_bit(a, b, n, beta.i_lo + k, j, value >> bit & 1);
    }
  }
}

}  // namespace

JsonSchemaError::JsonSchemaError(const std::string& file,
                                 const std::string& path,
                                 const std::string& expected)
    : std::runtime_error(file + ": at " + path + ": expected " + expected),
      file_(file),
      path_(path),
      expected_(expected) {}

std::string group_to_json(const GroupSpec& g) { return dump(group_json(g)); }

GroupSpec group_from_json(const std::string& text, const std::string& file) {
  Json j = parse_text(text, file);
  return group_at(Cur{&j, &file, ""});
}

std::string tile_to_json(const Tile& tile) {
  Json j;
  j["group"] = group_json(tile.group);
  j["elements"] = tile_elements_json(tile);
  return dump(j);
}

Tile tile_from_json(const std::string& text, const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  GroupSpec g = group_at(c.at("group", "tile"));
  return tile_at(c.at("elements", "tile"), g, "tile elements");
}

std::string tiling_system_to_json(const TilingSystem& system) {
  Json j;
  j["group"] = group_json(system.group);
  Json tiles = Json::array();
  for (const Tile& tile : system.tiles) {
    tiles.push_back(tile_elements_json(tile));
  }
  j["tiles"] = std::move(tiles);
  return dump(j);
}

TilingSystem tiling_system_from_json(const std::string& text,
                                     const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  TilingSystem out;
  out.group = group_at(c.at("group", "tiling system"));
  Cur tiles = c.at("tiles", "tiling system");
  const Json& a = tiles.arr("tile list");
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.tiles.push_back(tile_at(tiles.idx(i), out.group, "tile elements"));
  }
  return out;
}

std::string periodic_set_to_json(const PeriodicSet& set) {
  Json j;
  j["group"] = group_json(set.lattice.group);
  Json gens = Json::array();
  for (const GroupElement& g : set.lattice.generators) {
    gens.push_back(element_json(g));
  }
  j["lattice"] = std::move(gens);
  Json memb = Json::array();
  for (char m : set.membership) memb.push_back(m ? 1 : 0);
  j["membership"] = std::move(memb);
  return dump(j);
}

PeriodicSet periodic_set_from_json(const std::string& text,
                                   const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  GroupSpec g = group_at(c.at("group", "periodic set"));
  PeriodicSet out;
  out.lattice.group = g;
  out.lattice.generators =
      element_list_at(c.at("lattice", "periodic set"), g, "lattice");
  Cur memb = c.at("membership", "periodic set");
  long long cells = 0;
  try {
    cells = Quotient(g, out.lattice).size();
  } catch (const std::exception& e) {
    c.at("lattice", "periodic set")
        .fail(std::string("finite-index lattice (") + e.what() + ")");
  }
  const Json& a = memb.arr("membership flags");
  if (static_cast<long long>(a.size()) != cells) {
    memb.fail(std::to_string(cells) + " membership flags (quotient order)");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long long v = memb.idx(i).as_int("membership flag");
    if (v != 0 && v != 1) memb.idx(i).fail("0/1 membership flag");
    out.membership.push_back(static_cast<char>(v));
  }
  return out;
}

std::string functional_system_to_json(const FunctionalSystem& system) {
  return dump(functional_system_json(system));
}

FunctionalSystem functional_system_from_json(const std::string& text,
                                             const std::string& file) {
  Json j = parse_text(text, file);
  return functional_system_at(Cur{&j, &file, ""});
}

std::string wrapper_to_json(const ExistentialWrapper& wrapper) {
  Json j;
  j["inner"] = functional_system_json(wrapper.inner);
  j["quantified"] = wrapper.quantified;
  return dump(j);
}

ExistentialWrapper wrapper_from_json(const std::string& text,
                                     const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  ExistentialWrapper out;
  out.inner = functional_system_at(c.at("inner", "wrapper"));
  Cur q = c.at("quantified", "wrapper");
  for (long long id : q.int_array("quantified ids")) {
    if (id < 0 || id >= static_cast<long long>(out.inner.components.size())) {
      q.fail("component ids below " +
             std::to_string(out.inner.components.size()) +
             " (quantified ids)");
    }
    out.quantified.push_back(static_cast<int>(id));
  }
  return out;
}

std::string family_to_json(const FunctionFamily& family) {
  Json j;
  j["domain"] = group_json(family.domain);
  Json gens = Json::array();
  for (const GroupElement& g : family.lattice.generators) {
    gens.push_back(element_json(g));
  }
  j["lattice"] = std::move(gens);
  Json comps = Json::array();
  for (const GroupSpec& g : family.components) comps.push_back(group_json(g));
  j["components"] = std::move(comps);
  j["values"] = family.values;
  return dump(j);
}

FunctionFamily family_from_json(const std::string& text,
                                const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  FunctionFamily out;
  out.domain = group_at(c.at("domain", "function family"));
  out.lattice.group = out.domain;
  out.lattice.generators = element_list_at(c.at("lattice", "function family"),
                                           out.domain, "lattice");
  {
    Cur comps = c.at("components", "function family");
    const Json& a = comps.arr("component list");
    for (std::size_t i = 0; i < a.size(); ++i) {
      GroupSpec g = group_at(comps.idx(i));
      if (!g.is_finite()) comps.idx(i).fail("finite component group");
      out.components.push_back(std::move(g));
    }
  }
  long long cells = 0;
  try {
    cells = Quotient(out.domain, out.lattice).size();
  } catch (const std::exception& e) {
    c.at("lattice", "function family")
        .fail(std::string("finite-index lattice (") + e.what() + ")");
  }
  Cur values = c.at("values", "function family");
  const Json& va = values.arr("value tables");
  if (va.size() != out.components.size()) {
    values.fail(std::to_string(out.components.size()) +
                " value tables (one per component)");
  }
  for (std::size_t w = 0; w < va.size(); ++w) {
    Cur table = values.idx(w);
    std::vector<long long> vals = table.int_array("value table");
    if (static_cast<long long>(vals.size()) != cells) {
      table.fail(std::to_string(cells) + " values (quotient order)");
    }
    const long long order = group_order(out.components[w]);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] < 0 || vals[i] >= order) {
        table.idx(i).fail("dense index below " + std::to_string(order));
      }
    }
    out.values.push_back(std::move(vals));
  }
  return out;
}

std::string property_to_json(
    const PropertySpec& spec,
    const std::optional<std::vector<std::string>>& omega_words) {
  return dump(property_json(spec, omega_words));
}

PropertySpec property_from_json(const std::string& text,
                                const std::string& file) {
  Json j = parse_text(text, file);
  return property_at(Cur{&j, &file, ""});
}

std::string window_to_json(const SudokuWindow& w) {
  Json j;
  j["s0"] = w.params.s0;
  j["m_lo"] = w.m_lo;
  j["m_hi"] = w.m_hi;
  j["rows"] = w.rows;
  return dump(j);
}

SudokuWindow window_from_json(const std::string& text,
                              const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  SudokuWindow out;
  out.params.s0 = static_cast<int>(c.at("s0", "window").as_int("s0"));
  out.m_lo = c.at("m_lo", "window").as_int("m_lo");
  out.m_hi = c.at("m_hi", "window").as_int("m_hi");
  Cur rows = c.at("rows", "window");
  const Json& a = rows.arr("row list");
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<long long> row = rows.idx(i).int_array("digit row");
    out.rows.emplace_back(row.begin(), row.end());
  }
  try {
    validate_window(out);
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("valid window (") + e.what() + ")");
  }
  return out;
}

std::string beta_to_json(const BetaTuple& beta) {
  Json j;
  j["s0"] = beta.params.s0;
  j["i_lo"] = beta.i_lo;
  j["i_hi"] = beta.i_hi;
  j["j_lo"] = beta.j_lo;
  j["j_hi"] = beta.j_hi;
  Json functions = Json::array();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < beta.params.s0; ++b) {
      for (long long n = 1; n <= beta.params.board_n(); ++n) {
        Json jf;
        jf["a"] = a;
        jf["b"] = b;
        jf["n"] = n;
        Json rows = Json::array();
        for (long long row_j = beta.j_lo; row_j <= beta.j_hi; ++row_j) {
          rows.push_back(hex_row(beta, a, b, n, row_j));
        }
        jf["rows"] = std::move(rows);
        functions.push_back(std::move(jf));
      }
    }
  }
  j["functions"] = std::move(functions);
  return dump(j);
}

BetaTuple beta_from_json(const std::string& text, const std::string& file) {
  Json j = parse_text(text, file);
  Cur c{&j, &file, ""};
  BoardParams params;
  params.s0 = static_cast<int>(c.at("s0", "beta tuple").as_int("s0"));
  const long long i_lo = c.at("i_lo", "beta tuple").as_int("i_lo");
  const long long i_hi = c.at("i_hi", "beta tuple").as_int("i_hi");
  const long long j_lo = c.at("j_lo", "beta tuple").as_int("j_lo");
  const long long j_hi = c.at("j_hi", "beta tuple").as_int("j_hi");
  BetaTuple out;
  try {
    out = make_beta_tuple(params, i_lo, i_hi, j_lo, j_hi);
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("valid beta tuple shape (") + e.what() + ")");
  }
  Cur functions = c.at("functions", "beta tuple");
  const Json& fa = functions.arr("function list");
  if (static_cast<long long>(fa.size()) != out.function_count()) {
    functions.fail(std::to_string(out.function_count()) +
                   " functions (one per bit position and column)");
  }
  std::vector<char> seen(static_cast<std::size_t>(out.function_count()), 0);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    Cur cf = functions.idx(i);
    const long long a = cf.at("a", "function").as_int("side a");
    const long long b = cf.at("b", "function").as_int("bit position b");
    const long long n = cf.at("n", "function").as_int("column n");
    if (a < 0 || a > 1) cf.fail("side a in {0, 1} (function)");
    if (b < 0 || b >= params.s0) {
      cf.fail("bit position below " + std::to_string(params.s0) +
              " (function)");
    }
    if (n < 1 || n > params.board_n()) {
      cf.fail("column in [1, " + std::to_string(params.board_n()) +
              "] (function)");
    }
    const long long fn = (a * params.s0 + b) * params.board_n() + (n - 1);
    if (seen[static_cast<std::size_t>(fn)]) {
      cf.fail("each (a, b, n) at most once (function list)");
    }
    seen[static_cast<std::size_t>(fn)] = 1;
    Cur rows = cf.at("rows", "function");
    const Json& ra = rows.arr("hex rows");
    if (static_cast<long long>(ra.size()) != out.j_extent()) {
      rows.fail(std::to_string(out.j_extent()) + " hex rows (one per j)");
    }
    for (std::size_t r = 0; r < ra.size(); ++r) {
      fill_row(out, rows.idx(r), rows.idx(r).as_str("hex row"),
               static_cast<int>(a), static_cast<int>(b), n,
               j_lo + static_cast<long long>(r));
    }
  }
  return out;
}

}  // namespace forge
