#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/encoding.hpp"
#include "forge/functional.hpp"
#include "forge/sudoku.hpp"
#include "forge/tiling.hpp"

namespace forge {

/**
 * Structural failure while reading one of the documented JSON schemas.
 * The message always names the input file, the JSON-pointer-style path
 * of the offending node, and the expected schema fragment, e.g.
 *
 *   system.json: at /tiles/0/1: expected array of 2 integers (element
 *   of Z x Z/4)
 */
class JsonSchemaError : public std::runtime_error {
 public:
  JsonSchemaError(const std::string& file, const std::string& path,
                  const std::string& expected);

  const std::string& file() const { return file_; }
  const std::string& path() const { return path_; }
  const std::string& expected() const { return expected_; }

 private:
  std::string file_, path_, expected_;
};

/*
 * Serializers emit deterministic, pretty-printed JSON that re-parses
 * under the same schema; parsers take the raw text plus a file name used
 * in error messages.  The schemas (also documented in the README):
 *
 *   GroupSpec        {"free_rank": 2, "torsion": [2, 2, 2]}
 *   element          flat integer array, one entry per coordinate
 *   Tile             {"group": GroupSpec, "elements": [element...]}
 *   TilingSystem     {"group": GroupSpec, "tiles": [[element...]...]}
 *   PeriodicSet      {"group": GroupSpec, "lattice": [element...],
 *                     "membership": [0/1...]}        (quotient order)
 *   SetExpr          {"kind": "explicit", "values": [[int...]...]} or
 *                    {"kind": "kernel"|"kernel-complement",
 *                     "rows": [[int...]...]}
 *   FunctionalSystem {"domain": GroupSpec, "components": [GroupSpec...],
 *                     "equations": [{"support": [int...], "label": str,
 *                       "terms": [{"shift": element, "set": SetExpr}]}]}
 *   wrapper          {"inner": FunctionalSystem, "quantified": [int...]}
 *   FunctionFamily   {"domain": GroupSpec, "lattice": [element...],
 *                     "components": [GroupSpec...],
 *                     "values": [[int...]...]}       (quotient order)
 *   PropertySpec     {"kind": "clock"|..., "domain": GroupSpec, ...}
 *                    (per-kind parameter fields; "omega" is "all" or an
 *                    array of accepted 0/1 words)
 *   SudokuWindow     {"s0": 2, "m_lo": int, "m_hi": int,
 *                     "rows": [[digit...]...]}       (rows[m-m_lo][n-1])
 *   BetaTuple        {"s0": 2, "i_lo": .., "i_hi": .., "j_lo": ..,
 *                     "j_hi": .., "functions": [{"a": 0/1, "b": int,
 *                       "n": int, "rows": [hex...]}]}
 *                    (one hex string per j row; bytes little-endian in
 *                    i - i_lo, bit k of a byte = LSB-first)
 */

std::string group_to_json(const GroupSpec& g);
GroupSpec group_from_json(const std::string& text,
                          const std::string& file = "<input>");

std::string tile_to_json(const Tile& tile);
Tile tile_from_json(const std::string& text,
                    const std::string& file = "<input>");

std::string tiling_system_to_json(const TilingSystem& system);
TilingSystem tiling_system_from_json(const std::string& text,
                                     const std::string& file = "<input>");

std::string periodic_set_to_json(const PeriodicSet& set);
/** Returns the set; the carried lattice keeps the parsed group. */
PeriodicSet periodic_set_from_json(const std::string& text,
                                   const std::string& file = "<input>");

std::string functional_system_to_json(const FunctionalSystem& system);
FunctionalSystem functional_system_from_json(
    const std::string& text, const std::string& file = "<input>");

std::string wrapper_to_json(const ExistentialWrapper& wrapper);
ExistentialWrapper wrapper_from_json(const std::string& text,
                                     const std::string& file = "<input>");

std::string family_to_json(const FunctionFamily& family);
FunctionFamily family_from_json(const std::string& text,
                                const std::string& file = "<input>");

/**
 * PropertySpec serialization.  The omega predicate of a symmetric
 * boolean constraint is a function and cannot be introspected, so the
 * writer takes the accepted word list explicitly: absent means "all"
 * (every word accepted).  The parser builds the matching predicate.
 */
std::string property_to_json(
    const PropertySpec& spec,
    const std::optional<std::vector<std::string>>& omega_words = std::nullopt);
PropertySpec property_from_json(const std::string& text,
                                const std::string& file = "<input>");

std::string window_to_json(const SudokuWindow& w);
SudokuWindow window_from_json(const std::string& text,
                              const std::string& file = "<input>");

std::string beta_to_json(const BetaTuple& beta);
BetaTuple beta_from_json(const std::string& text,
                         const std::string& file = "<input>");

}  // namespace forge
