#include "bounded/runtime/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>

#include "bounded/core/errors.hpp"
#include "bounded/ground/fixture_embedder.hpp"
#include "bounded/ground/remote_embedder.hpp"
#include "bounded/policy/mock_policy.hpp"
#include "bounded/policy/remote_policy.hpp"

namespace bounded::runtime {

RoomState parse_scenario(std::istream& in, const RoomConfig& base) {
  RoomState room;
  room.config = base;
  bool have_room = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::tuple<AgentId, AgentId, int, std::size_t>> relationships;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "room") {
        if (have_room) throw Error(Errc::parse, "second room line", line_no);
        room.room_id = j.at("room_id").get<std::string>();
        if (j.contains("config")) room.config = room_config_from_json(j.at("config"), room.config);
        if (j.contains("master_seed")) room.config.master_seed = j.at("master_seed").get<std::uint64_t>();
        have_room = true;
      } else if (type == "agent") {
        auto a = agent_from_json(j);
        a.heartbeat_period = j.value("heartbeat_period", room.config.heartbeat_period);
        a.next_heartbeat = j.value("heartbeat_offset", Tick{0});
        if (a.next_heartbeat < 0) throw Error(Errc::validation, "negative heartbeat_offset", line_no);
        if (room.find_agent(a.agent_id) != nullptr) {
          throw Error(Errc::validation, "duplicate agent '" + a.agent_id + "'", line_no);
        }
        room.agents.push_back(std::move(a));
      } else if (type == "relationship") {
        relationships.emplace_back(j.at("from").get<std::string>(), j.at("to").get<std::string>(),
                                   j.at("score").get<int>(), line_no);
      } else {
        throw Error(Errc::parse, "unknown scenario line type '" + type + "'", line_no);
      }
    } catch (const Json::exception& e) {
      throw Error(Errc::parse, e.what(), line_no);
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code(), e.what(), line_no);
    }
  }
  if (!have_room) throw Error(Errc::parse, "scenario has no room line");
  if (room.agents.empty()) throw Error(Errc::validation, "scenario has no agents");

  std::set<PlayerId> owners;
  for (const auto& a : room.agents) {
    if (a.owner && !owners.insert(*a.owner).second) {
      throw Error(Errc::validation, "player '" + *a.owner + "' owns more than one agent");
    }
  }
  for (const auto& [from, to, score, at] : relationships) {
    auto* a = room.find_agent(from);
    if (a == nullptr || room.find_agent(to) == nullptr) {
      throw Error(Errc::unknown_agent, "relationship between unknown agents '" + from + "' and '" + to + "'", at);
    }
    a->relationship[to] = score;
  }
  room.rng_seed = room.config.master_seed;
  room.config.validate();
  return room;
}

RoomState load_scenario(const std::filesystem::path& path, const RoomConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open scenario '" + path.string() + "'");
  return parse_scenario(in, base);
}

namespace {

HttpEndpoint endpoint_from_json(const Json& j, HttpEndpoint e) {
  if (j.contains("url") && !j.at("url").is_null()) e.url = j.at("url").get<std::string>();
  e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
  e.retries = j.value("retries", e.retries);
  return e;
}

std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (dir / path).lexically_normal();
}

}  // namespace

AppConfig default_app_config(const std::filesystem::path& data_dir) {
  AppConfig c;
  c.catalog = data_dir / "catalog" / "sample_catalog.jsonl";
  c.embedder.path = data_dir / "embeddings" / "fixture_embeddings.jsonl";
  c.policy.rules = data_dir / "policy" / "mock_rules.jsonl";
  return c;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config '" + path.string() + "'");
  const auto dir = path.parent_path();
  AppConfig c;
  try {
    const auto j = Json::parse(in);
    if (j.contains("room")) c.room = room_config_from_json(j.at("room"), c.room);
    if (j.contains("catalog")) c.catalog = resolve(dir, j.at("catalog").get<std::string>());
    if (j.contains("embedder")) {
      const auto& e = j.at("embedder");
      c.embedder.backend = e.value("backend", c.embedder.backend);
      if (e.contains("path") && !e.at("path").is_null()) c.embedder.path = resolve(dir, e.at("path").get<std::string>());
      c.embedder.endpoint = endpoint_from_json(e, c.embedder.endpoint);
      if (e.contains("model_id") && !e.at("model_id").is_null()) c.embedder.model_id = e.at("model_id").get<std::string>();
      c.embedder.dimension = e.value("dimension", c.embedder.dimension);
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      c.policy.backend = p.value("backend", c.policy.backend);
      if (p.contains("rules") && !p.at("rules").is_null()) c.policy.rules = resolve(dir, p.at("rules").get<std::string>());
      c.policy.endpoint = endpoint_from_json(p, c.policy.endpoint);
    }
    if (j.contains("gateway")) {
      const auto& g = j.at("gateway");
      c.gateway.host = g.value("host", c.gateway.host);
      c.gateway.port = g.value("port", c.gateway.port);
      c.gateway.tick_ms = g.value("tick_ms", c.gateway.tick_ms);
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::parse, "config '" + path.string() + "': " + e.what());
  }
  c.room.validate();
  return c;
}

void apply_env_overrides(AppConfig& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("BOUNDED_POLICY_URL")) {
    c.policy.backend = "remote";
    c.policy.endpoint.url = *v;
  }
  if (auto v = env("BOUNDED_POLICY_AUTH")) c.policy.endpoint.authorization = *v;
  if (auto v = env("BOUNDED_EMBEDDER_URL")) {
    c.embedder.backend = "remote";
    c.embedder.endpoint.url = *v;
  }
  if (auto v = env("BOUNDED_EMBEDDER_AUTH")) c.embedder.endpoint.authorization = *v;
  if (auto v = env("BOUNDED_EMBEDDER_MODEL")) c.embedder.model_id = *v;
  if (auto v = env("BOUNDED_EMBEDDER_DIM")) {
    try {
      c.embedder.dimension = std::stoul(*v);
    } catch (const std::exception&) {
      throw Error(Errc::validation, "BOUNDED_EMBEDDER_DIM is not a number");
    }
  }
}

std::shared_ptr<const ground::Embedder> make_embedder(const EmbedderSettings& s) {
  if (s.backend == "fixture") {
    return std::make_shared<ground::FixtureEmbedder>(ground::FixtureEmbedder::load(s.path));
  }
  if (s.backend == "remote") {
    if (s.endpoint.url.empty()) throw Error(Errc::validation, "remote embedder needs a url");
    if (s.dimension == 0) throw Error(Errc::validation, "remote embedder needs a dimension");
    auto remote = std::make_shared<ground::RemoteEmbedder>(s.endpoint, s.model_id, s.dimension);
    return std::make_shared<ground::CachingEmbedder>(std::move(remote));
  }
  throw Error(Errc::validation, "unknown embedder backend '" + s.backend + "'");
}

std::shared_ptr<policy::PolicyBackend> make_policy(const PolicySettings& s) {
  if (s.backend == "mock") return std::make_shared<policy::MockPolicy>(policy::load_rule_table(s.rules));
  if (s.backend == "remote") {
    if (s.endpoint.url.empty()) throw Error(Errc::validation, "remote policy needs a url");
    return std::make_shared<policy::RemotePolicy>(s.endpoint);
  }
  throw Error(Errc::validation, "unknown policy backend '" + s.backend + "'");
}

Services make_services(const AppConfig& c) {
  Services s;
  s.catalog = std::make_shared<const BundleCatalog>(load_catalog(c.catalog));
  s.embedder = make_embedder(c.embedder);
  s.policy = make_policy(c.policy);
  return s;
}

}  // namespace bounded::runtime
