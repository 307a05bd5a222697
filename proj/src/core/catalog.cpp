#include "bounded/core/catalog.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "bounded/core/errors.hpp"
#include "bounded/core/json.hpp"

namespace bounded {

namespace {

std::string pool_label(PoolKind kind) {
  switch (kind) {
    case PoolKind::talk: return "Talk";
    case PoolKind::non_talk: return "NonTalk";
    case PoolKind::to_self: return "ToSelf";
  }
  return "?";
}

}  // namespace

BundleCatalog BundleCatalog::from_bundles(std::vector<BehaviorBundle> bundles) {
  BundleCatalog out;
  std::set<std::string> seen;
  std::array<int, 3> defaults{0, 0, 0};

  for (const auto& b : bundles) {
    if (b.id.empty()) throw Error(Errc::validation, "bundle with empty id");
    if (!seen.insert(b.id).second) {
      throw Error(Errc::validation, "duplicate bundle id '" + b.id + "'");
    }
    if (b.pglv < 1 || b.pglv > 3) {
      throw Error(Errc::validation,
                  "bundle '" + b.id + "': pglv " + std::to_string(b.pglv) + " out of range 1..3");
    }
    if (b.is_safe_default) {
      if (b.pglv != 1 || !b.emotion_valence.empty()) {
        throw Error(Errc::validation, "bundle '" + b.id +
                                          "': safe default must have pglv 1 and no emotion valence");
      }
      ++defaults[static_cast<std::size_t>(b.pool)];
    }
    out.pools_[static_cast<std::size_t>(b.pool)].push_back(b);
  }

  for (PoolKind kind : {PoolKind::talk, PoolKind::non_talk, PoolKind::to_self}) {
    const auto i = static_cast<std::size_t>(kind);
    if (out.pools_[i].empty()) {
      throw Error(Errc::validation, "pool " + pool_label(kind) + " is empty");
    }
    if (defaults[i] == 0) {
      throw Error(Errc::validation, "pool " + pool_label(kind) + " has no safe default");
    }
    if (defaults[i] > 1) {
      throw Error(Errc::validation, "pool " + pool_label(kind) + " has " +
                                        std::to_string(defaults[i]) + " safe defaults");
    }
  }
  out.bundles_ = std::move(bundles);
  return out;
}

const BehaviorBundle* BundleCatalog::find(std::string_view id) const {
  for (const auto& b : bundles_) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const BehaviorBundle& BundleCatalog::safe_default(PoolKind kind) const {
  for (const auto& b : pool(kind)) {
    if (b.is_safe_default) return b;
  }
  throw Error(Errc::validation, "pool " + pool_label(kind) + " has no safe default");
}

bool BundleCatalog::matches_full_profile() const {
  return count(PoolKind::talk) == kProfileTalk && count(PoolKind::non_talk) == kProfileNonTalk &&
         count(PoolKind::to_self) == kProfileSelf;
}

BundleCatalog parse_catalog(std::istream& in) {
  std::vector<BehaviorBundle> bundles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::parse, e.what(), line_no);
    }
    try {
      bundles.push_back(bundle_from_json(j));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse, e.what(), line_no);
    }
  }
  return BundleCatalog::from_bundles(std::move(bundles));
}

BundleCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open catalog '" + path.string() + "'");
  return parse_catalog(in);
}

void write_catalog(std::ostream& out, const BundleCatalog& catalog) {
  for (const auto& b : catalog.bundles()) out << bundle_to_json(b).dump() << '\n';
}

}  // namespace bounded
