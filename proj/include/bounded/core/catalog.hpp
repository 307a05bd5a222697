#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "bounded/core/types.hpp"

namespace bounded {

// Validated bundle inventory split into the three pools.
//
// Invariants (enforced by from_bundles):
//  - ids unique, pglv in 1..3, every pool non-empty
//  - exactly one safe default per pool, with pglv 1 and no valence tags so
//    it survives every content and emotion filter
class BundleCatalog {
 public:
  // Reference pool sizes of the deployed inventory.
  static constexpr std::size_t kProfileTalk = 258;
  static constexpr std::size_t kProfileNonTalk = 90;
  static constexpr std::size_t kProfileSelf = 30;

  BundleCatalog() = default;

  // Throws Error(Errc::validation) naming the offending bundle or pool.
  static BundleCatalog from_bundles(std::vector<BehaviorBundle> bundles);

  const std::vector<BehaviorBundle>& bundles() const { return bundles_; }
  const std::vector<BehaviorBundle>& pool(PoolKind kind) const {
    return pools_[static_cast<std::size_t>(kind)];
  }
  std::size_t count(PoolKind kind) const { return pool(kind).size(); }

  const BehaviorBundle* find(std::string_view id) const;
  const BehaviorBundle& safe_default(PoolKind kind) const;

  // True when pool sizes equal the reference full-scale profile.
  bool matches_full_profile() const;

  bool operator==(const BundleCatalog& other) const { return bundles_ == other.bundles_; }

 private:
  std::vector<BehaviorBundle> bundles_;
  std::array<std::vector<BehaviorBundle>, 3> pools_;
};

// JSONL, one bundle per line. Blank lines are ignored.
BundleCatalog parse_catalog(std::istream& in);
BundleCatalog load_catalog(const std::filesystem::path& path);
void write_catalog(std::ostream& out, const BundleCatalog& catalog);

}  // namespace bounded
