#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bounded/converge/converge.hpp"
#include "bounded/core/json.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/grounding.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"

namespace bounded::runtime {

inline constexpr int kTraceSchemaVersion = 1;

struct DecayNote {
  int source = 0;
  double probability = 1.0;
  double draw = 0.0;
  bool continued = true;
};

struct GroundingNote {
  PoolKind pool = PoolKind::talk;
  ground::GroundingMatch match;
};

struct RelationshipUpdate {
  AgentId from;
  AgentId to;
  int delta = 0;
};

// One line per emitted event plus the decisions that produced it.
struct TraceRecord {
  Event event;
  PriorityClass priority = PriorityClass::B;
  std::optional<DecayNote> decay;
  std::optional<converge::LockDecision> lock;
  std::optional<EventId> supersedes;
  std::vector<GroundingNote> grounding;
  std::string policy_backend;
  std::optional<policy::PolicyProposal> proposal;
  std::vector<RelationshipUpdate> relationship_updates;
  std::optional<policy::DialogueStatus> dialogue_status;
  // Stimuli the reply was arbitrated among.
  std::vector<EventId> candidates;
};

// Decisions that did not emit an event.
struct DecisionRecord {
  Tick time = 0;
  AgentId agent;
  // continuation_failed | lock_rejected | policy_failure
  std::string outcome;
  std::optional<EventId> stimulus;
  std::optional<DecayNote> decay;
  std::string detail;
};

enum class HaltReason { depth_cap, event_ceiling };

std::string_view to_string(HaltReason r);

struct HaltRecord {
  Tick time = 0;
  EventId chain_root = 0;
  HaltReason reason = HaltReason::depth_cap;
  int max_source = 0;
  int events = 0;
  int dropped_stimuli = 0;
};

Json trace_header(const RoomState& initial);
Json to_json(const TraceRecord& r);
Json to_json(const DecisionRecord& r);
Json to_json(const HaltRecord& r);
Json to_json(const ground::GroundingMatch& m);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void write(const Json& line) = 0;
  // Called once per round. Throws Error(Errc::io) on write failure.
  virtual void flush() = 0;
};

// One JSON document per line.
class JsonlTraceSink final : public TraceSink {
 public:
  explicit JsonlTraceSink(const std::filesystem::path& path);
  explicit JsonlTraceSink(std::ostream& out) : out_(&out) {}

  void write(const Json& line) override;
  void flush() override;

 private:
  std::ofstream file_;
  std::ostream* out_;
};

class MemoryTraceSink final : public TraceSink {
 public:
  void write(const Json& line) override { lines_.push_back(line.dump()); }
  void flush() override {}

  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;

 private:
  std::vector<std::string> lines_;
};

struct ReplayResult {
  RoomState state;
  std::size_t records = 0;
  std::size_t events = 0;
  std::size_t decisions = 0;
  std::size_t halts = 0;
};

// Rebuilds the final room state (history, clock, relationship scores) from a
// trace. Throws Error(Errc::replay) with the 1-based line number.
ReplayResult replay_trace(std::istream& in);
ReplayResult replay_trace_file(const std::filesystem::path& path);

// Fields compared by replay checks: agent relationships, history and clock.
bool same_replayable_state(const RoomState& a, const RoomState& b);

}  // namespace bounded::runtime
