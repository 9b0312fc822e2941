#include "forge/rigid.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace forge {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/** Deterministic stream of 64-bit words keyed on its construction inputs. */
struct MixStream {
  std::uint64_t state;
  MixStream(std::uint64_t a, std::uint64_t b, std::uint64_t c,
            std::uint64_t d) {
    state = mix64(mix64(mix64(mix64(a) ^ b) ^ c) ^ d);
  }
  std::uint64_t next() { return state = mix64(state); }
};

using Mask = std::vector<std::uint64_t>;

Mask make_mask(long long modulus, const std::vector<long long>& members) {
  Mask m(static_cast<std::size_t>((modulus + 63) / 64), 0);
  for (long long v : members)
    m[static_cast<std::size_t>(v >> 6)] |= 1ULL << (v & 63);
  return m;
}

Mask rotate_mask(const Mask& mask, long long modulus, long long shift) {
  Mask out(mask.size(), 0);
  for (std::size_t w = 0; w < mask.size(); ++w) {
    std::uint64_t word = mask[w];
    while (word != 0) {
      int bit = std::countr_zero(word);
      word &= word - 1;
      long long v = (static_cast<long long>(w) * 64 + bit + shift) % modulus;
      out[static_cast<std::size_t>(v >> 6)] |= 1ULL << (v & 63);
    }
  }
  return out;
}

bool masks_intersect(const Mask& a, const Mask& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if ((a[w] & b[w]) != 0) return true;
  return false;
}

}  // namespace

bool verify_rigid_partition(const RigidPartition& partition) {
  const long long n = partition.modulus;
  if (n < 1 || partition.classes.empty()) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& cls : partition.classes) {
    if (cls.empty()) return false;
    for (long long v : cls) {
      if (v < 0 || v >= n) return false;
      if (seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  for (char s : seen)
    if (!s) return false;

  std::vector<Mask> masks;
  for (const auto& cls : partition.classes) masks.push_back(make_mask(n, cls));
  for (std::size_t j = 0; j < masks.size(); ++j)
    for (long long h = 1; h < n; ++h) {
      Mask rotated = rotate_mask(masks[j], n, h);
      for (std::size_t i = 0; i < masks.size(); ++i)
        if (!masks_intersect(masks[i], rotated)) return false;
    }
  return true;
}

RigidPartition build_rigid_partition(int classes, std::uint64_t seed) {
  if (classes < 1)
    throw std::invalid_argument("build_rigid_partition: need at least 1 class");
  if (classes == 1) {
    RigidPartition p{2, {{0, 1}}};
    return p;
  }
  constexpr long long kModulusCap = 1LL << 24;
  for (long long n = 8; n <= kModulusCap; n *= 2) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      MixStream stream(static_cast<std::uint64_t>(classes), seed,
                       static_cast<std::uint64_t>(n),
                       static_cast<std::uint64_t>(attempt));
      RigidPartition p;
      p.modulus = n;
      p.classes.assign(static_cast<std::size_t>(classes), {});
      for (long long v = 0; v < n; ++v)
        p.classes[stream.next() % static_cast<std::uint64_t>(classes)]
            .push_back(v);
      if (verify_rigid_partition(p)) return p;
    }
  }
  throw std::runtime_error(
      "build_rigid_partition: no rigid partition found up to modulus 2^24");
}

GroupSpec extend_with_cyclic(const GroupSpec& group, long long modulus) {
  if (modulus < 1)
    throw std::invalid_argument("extend_with_cyclic: modulus must be >= 1");
  GroupSpec out = group;
  out.torsion_orders.push_back(modulus);
  return out;
}

PeriodLattice extend_lattice(const PeriodLattice& lattice, long long modulus) {
  PeriodLattice out;
  out.group = extend_with_cyclic(lattice.group, modulus);
  for (const auto& gen : lattice.generators) {
    std::vector<long long> coords = gen.coords;
    coords.push_back(0);
    out.generators.push_back(make_element(out.group, std::move(coords)));
  }
  return out;
}

Tile stack_system(const TilingSystem& system, const RigidPartition& partition) {
  if (system.tiles.empty())
    throw std::invalid_argument("stack_system: system has no tiles");
  if (system.tiles.size() != partition.classes.size())
    throw std::invalid_argument(
        "stack_system: partition must have one class per tile (" +
        std::to_string(partition.classes.size()) + " classes, " +
        std::to_string(system.tiles.size()) + " tiles)");
  GroupSpec extended = extend_with_cyclic(system.group, partition.modulus);
  std::vector<GroupElement> elements;
  for (std::size_t m = 0; m < system.tiles.size(); ++m) {
    if (system.tiles[m].group != system.group)
      throw std::invalid_argument("stack_system: tile group mismatch");
    for (const auto& f : system.tiles[m].elements)
      for (long long e : partition.classes[m]) {
        std::vector<long long> coords = f.coords;
        coords.push_back(e);
        elements.push_back(make_element(extended, std::move(coords)));
      }
  }
  return make_tile(extended, elements);
}

}  // namespace forge
