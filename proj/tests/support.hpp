#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "bounded/core/catalog.hpp"
#include "bounded/ground/fixture_embedder.hpp"
#include "bounded/harness/trial.hpp"
#include "bounded/policy/mock_policy.hpp"
#include "bounded/runtime/scenario.hpp"

#ifndef BOUNDED_DATA_DIR
#error "BOUNDED_DATA_DIR must be defined by the build"
#endif

namespace bounded::testing {

inline std::filesystem::path data_dir() { return BOUNDED_DATA_DIR; }

inline runtime::AppConfig app_config() { return runtime::default_app_config(data_dir()); }

// Fresh services from the shipped fixtures (mock policy, fixture embedder).
inline runtime::Services services() { return runtime::make_services(app_config()); }

inline runtime::RoomState party_room() {
  return runtime::load_scenario(data_dir() / "scenarios/party_room.jsonl", app_config().room);
}

inline harness::TrialInputs trial_inputs() {
  auto s = services();
  return {party_room(), s.catalog, s.embedder, s.policy};
}

}  // namespace bounded::testing
