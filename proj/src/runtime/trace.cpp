#include "bounded/runtime/trace.hpp"

#include <algorithm>
#include <sstream>

#include "bounded/core/errors.hpp"
#include "bounded/core/priority.hpp"

namespace bounded::runtime {

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json decay_json(const std::optional<DecayNote>& d) {
  if (!d) return nullptr;
  return {{"source", d->source}, {"p", d->probability}, {"draw", d->draw}, {"continued", d->continued}};
}

}  // namespace

std::string_view to_string(HaltReason r) {
  return r == HaltReason::depth_cap ? "depth_cap" : "event_ceiling";
}

Json to_json(const ground::GroundingMatch& m) {
  Json top = Json::array();
  for (const auto& c : m.top) {
    top.push_back({{"id", c.id}, {"name", c.name}, {"pglv", c.pglv}, {"similarity", c.similarity}});
  }
  return {{"bundle", m.bundle.id},
          {"name", m.bundle.name},
          {"similarity", m.similarity},
          {"rank", m.rank},
          {"fell_back", m.fell_back},
          {"top", std::move(top)}};
}

Json trace_header(const RoomState& initial) {
  Json agents = Json::array();
  for (const auto& a : initial.agents) agents.push_back(agent_to_json(a));
  return {{"type", "header"},
          {"schema_version", kTraceSchemaVersion},
          {"room_id", initial.room_id},
          {"master_seed", initial.rng_seed},
          {"logical_clock", initial.logical_clock},
          {"config", room_config_to_json(initial.config)},
          {"agents", std::move(agents)}};
}

Json to_json(const TraceRecord& r) {
  Json grounding = Json::array();
  for (const auto& g : r.grounding) {
    auto j = to_json(g.match);
    j["pool"] = to_string(g.pool);
    grounding.push_back(std::move(j));
  }
  Json updates = Json::array();
  for (const auto& u : r.relationship_updates) {
    updates.push_back({{"from", u.from}, {"to", u.to}, {"delta", u.delta}});
  }
  Json proposal = nullptr;
  if (r.proposal) {
    proposal = {{"talk_name", r.proposal->talk_name},
                {"nontalk_name", opt(r.proposal->nontalk_name)},
                {"self_intent", opt(r.proposal->self_intent)},
                {"rationale", opt(r.proposal->rationale)}};
  }
  return {{"type", "event"},
          {"event", event_to_json(r.event)},
          {"priority", to_string(r.priority)},
          {"decay", decay_json(r.decay)},
          {"lock", r.lock ? Json(converge::to_string(*r.lock)) : Json(nullptr)},
          {"supersedes", opt(r.supersedes)},
          {"grounding", std::move(grounding)},
          {"policy", r.policy_backend},
          {"proposal", std::move(proposal)},
          {"relationship_updates", std::move(updates)},
          {"dialogue_status", r.dialogue_status ? Json(policy::to_string(*r.dialogue_status)) : Json(nullptr)},
          {"candidates", r.candidates}};
}

Json to_json(const DecisionRecord& r) {
  return {{"type", "decision"}, {"time", r.time},   {"agent", r.agent},
          {"outcome", r.outcome}, {"stimulus", opt(r.stimulus)}, {"decay", decay_json(r.decay)},
          {"detail", r.detail}};
}

Json to_json(const HaltRecord& r) {
  return {{"type", "halt"},
          {"time", r.time},
          {"chain_root", r.chain_root},
          {"reason", to_string(r.reason)},
          {"max_source", r.max_source},
          {"events", r.events},
          {"dropped_stimuli", r.dropped_stimuli}};
}

JsonlTraceSink::JsonlTraceSink(const std::filesystem::path& path) : file_(path, std::ios::trunc), out_(&file_) {
  if (!file_) throw Error(Errc::io, "cannot open trace file '" + path.string() + "'");
}

void JsonlTraceSink::write(const Json& line) {
  *out_ << line.dump() << '\n';
  if (!*out_) throw Error(Errc::io, "trace write failed");
}

void JsonlTraceSink::flush() {
  out_->flush();
  if (!*out_) throw Error(Errc::io, "trace flush failed");
}

std::string MemoryTraceSink::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

ReplayResult replay_trace(std::istream& in) {
  ReplayResult result;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& what) -> Error {
    return Error(Errc::replay, what, line_no);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw fail(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw fail("record without a type");
    const auto type = j["type"].get<std::string>();
    ++result.records;
    try {
      if (type == "header") {
        if (have_header) throw fail("second header");
        if (j.value("schema_version", 0) != kTraceSchemaVersion) throw fail("unsupported schema_version");
        auto& s = result.state;
        s.room_id = j.at("room_id").get<std::string>();
        s.rng_seed = j.at("master_seed").get<std::uint64_t>();
        s.logical_clock = j.at("logical_clock").get<Tick>();
        s.config = room_config_from_json(j.at("config"));
        for (const auto& a : j.at("agents")) s.agents.push_back(agent_from_json(a));
        have_header = true;
        continue;
      }
      if (!have_header) throw fail("record before header");
      auto& s = result.state;
      if (type == "event") {
        auto e = event_from_json(j.at("event"));
        if (!s.history.empty()) {
          const auto& last = s.history.back();
          if (e.logical_time < last.logical_time ||
              (e.logical_time == last.logical_time && e.event_id <= last.event_id)) {
            throw fail("event out of order");
          }
        }
        if (j.contains("supersedes") && !j["supersedes"].is_null()) {
          const auto id = j["supersedes"].get<EventId>();
          auto it = std::find_if(s.history.begin(), s.history.end(),
                                 [&](const Event& h) { return h.event_id == id; });
          if (it == s.history.end()) throw fail("supersedes unknown event " + std::to_string(id));
          it->superseded = true;
        }
        for (const auto& u : j.at("relationship_updates")) {
          auto* from = s.find_agent(u.at("from").get<std::string>());
          if (from == nullptr) throw fail("relationship update for unknown agent");
          from->relationship[u.at("to").get<std::string>()] += u.at("delta").get<int>();
        }
        s.history.push_back(std::move(e));
        s.logical_clock = std::max(s.logical_clock, s.history.back().logical_time);
        ++result.events;
      } else if (type == "decision") {
        s.logical_clock = std::max(s.logical_clock, j.at("time").get<Tick>());
        ++result.decisions;
      } else if (type == "halt") {
        s.logical_clock = std::max(s.logical_clock, j.at("time").get<Tick>());
        ++result.halts;
      } else if (type == "round") {
        s.logical_clock = j.at("clock").get<Tick>();
      } else {
        throw fail("unknown record type '" + type + "'");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::replay) throw;
      throw fail(e.what());
    } catch (const Json::exception& e) {
      throw fail(e.what());
    }
  }
  if (!have_header) throw Error(Errc::empty_trace, "trace has no header");
  return result;
}

ReplayResult replay_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open trace '" + path.string() + "'");
  return replay_trace(in);
}

bool same_replayable_state(const RoomState& a, const RoomState& b) {
  if (a.room_id != b.room_id || a.logical_clock != b.logical_clock || a.history != b.history) return false;
  if (a.agents.size() != b.agents.size()) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    if (a.agents[i].agent_id != b.agents[i].agent_id ||
        a.agents[i].relationship != b.agents[i].relationship) {
      return false;
    }
  }
  return true;
}

}  // namespace bounded::runtime
